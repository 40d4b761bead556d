//! Result tables with provenance, their CSV/JSON renderings, experiment
//! configurations, and plot-data emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};

pub const TOOL_VERSION: &str = concat!("curved-ingham ", env!("CARGO_PKG_VERSION"));

/// Reals are written with 17 significant digits, which round-trips `f64`.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_real(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    /// Text holding a comma, quote or newline is quoted and its quotes doubled.
    fn render_csv(&self) -> String {
        match self {
            Cell::Text(v) if v.contains([',', '"', '\n']) => format!("\"{}\"", v.replace('"', "\"\"")),
            other => other.render(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub config_hash: String,
    pub seed: u64,
    /// Excluded from every comparison between runs.
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar summaries (fitted slopes, thresholds, verdicts).
    pub summary: BTreeMap<String, Cell>,
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            provenance: Provenance {
                tool: TOOL_VERSION.into(),
                config_hash: String::new(),
                seed: 0,
                timestamp: String::new(),
            },
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width mismatch in {}", self.name);
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn with_provenance(mut self, config_hash: &str, seed: u64, timestamp: &str) -> Self {
        self.provenance.config_hash = config_hash.to_string();
        self.provenance.seed = seed;
        self.provenance.timestamp = timestamp.to_string();
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[idx].as_f64()).collect()
    }

    /// Comma-separated with `#` comment header lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# table: {}", self.name);
        let _ = writeln!(out, "# tool: {}", self.provenance.tool);
        let _ = writeln!(out, "# config_hash: {}", self.provenance.config_hash);
        let _ = writeln!(out, "# seed: {}", self.provenance.seed);
        let _ = writeln!(out, "# timestamp: {}", self.provenance.timestamp);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# {k}: {}", v.render());
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render_csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialise") + "\n"
    }
}

/// Drops timestamp lines so two renderings can be compared byte for byte.
pub fn strip_timestamps(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("# timestamp:") && !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

/// One experiment: which subcommand, its parameters, the seed, where results go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub subcommand: String,
    #[serde(default)]
    pub parameters: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Vec<String>,
}

impl ExperimentConfig {
    /// Hex SHA-256 of the canonical JSON (keys sorted by `serde_json::Map`).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("configs serialise");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn param_f64(&self, key: &str) -> Option<f64> {
        self.parameters.get(key).and_then(|v| v.as_f64())
    }

    pub fn param_i64(&self, key: &str) -> Option<i64> {
        self.parameters.get(key).and_then(|v| v.as_i64())
    }
}

/// A file of experiments: either one config or `{"experiments": [...]}`.
pub fn parse_configs(text: &str) -> Result<Vec<ExperimentConfig>> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    if let Some(list) = v.get("experiments") {
        Ok(serde_json::from_value(list.clone())?)
    } else if v.get("subcommand").is_some() {
        Ok(vec![serde_json::from_value(v)?])
    } else {
        Err(invalid("config must hold a subcommand or an experiments list"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlotKind {
    /// Every numeric column against the first, linear axes.
    Lines,
    /// First column against the others on log-log axes; a fitted line
    /// companion file is written when the table carries `slope`/`intercept`.
    LogLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    /// `(file name, contents)` pairs: whitespace-separated data and an SVG.
    pub files: Vec<(String, String)>,
}

/// Whitespace-separated columns for external plotting plus a small SVG preview.
pub fn emit_plot_data(table: &ResultTable, kind: PlotKind) -> Result<PlotData> {
    let numeric: Vec<usize> =
        (0..table.columns.len()).filter(|&j| table.rows.iter().all(|r| r[j].as_f64().is_some())).collect();
    if numeric.len() < 2 {
        return Err(invalid(format!("table {} has fewer than two numeric columns", table.name)));
    }
    let mut dat = String::new();
    let _ = writeln!(dat, "# {}", numeric.iter().map(|&j| table.columns[j].as_str()).collect::<Vec<_>>().join(" "));
    for row in &table.rows {
        let vals: Vec<String> = numeric.iter().map(|&j| fmt_real(row[j].as_f64().unwrap())).collect();
        dat.push_str(&vals.join(" "));
        dat.push('\n');
    }
    let mut files = vec![(format!("{}.dat", table.name), dat)];
    let xs: Vec<f64> = table.rows.iter().map(|r| r[numeric[0]].as_f64().unwrap()).collect();
    let series: Vec<(String, Vec<f64>)> = numeric[1..]
        .iter()
        .map(|&j| (table.columns[j].clone(), table.rows.iter().map(|r| r[j].as_f64().unwrap()).collect()))
        .collect();
    if kind == PlotKind::LogLog {
        if let (Some(Cell::Real(slope)), Some(Cell::Real(icpt))) =
            (table.summary.get("slope"), table.summary.get("intercept"))
        {
            let mut fit = String::from("# x fitted\n");
            for x in &xs {
                let _ = writeln!(fit, "{} {}", fmt_real(*x), fmt_real((icpt + slope * x.ln()).exp()));
            }
            files.push((format!("{}_fit.dat", table.name), fit));
        }
    }
    files.push((format!("{}.svg", table.name), svg_lines(&xs, &series, kind == PlotKind::LogLog)));
    Ok(PlotData { files })
}

fn svg_lines(xs: &[f64], series: &[(String, Vec<f64>)], log: bool) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let tr = |v: f64| if log { v.max(f64::MIN_POSITIVE).ln() } else { v };
    let finite = |v: &f64| v.is_finite() && (!log || *v > 0.0);
    let xr: Vec<f64> = xs.iter().filter(|v| finite(v)).map(|v| tr(*v)).collect();
    let yr: Vec<f64> = series.iter().flat_map(|(_, ys)| ys.iter()).filter(|v| finite(v)).map(|v| tr(*v)).collect();
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi > lo {
            (lo, hi)
        } else {
            (lo.min(0.0), lo.max(0.0) + 1.0)
        }
    };
    let (x0, x1) = span(&xr);
    let (y0, y1) = span(&yr);
    let px = |x: f64| PAD + (tr(x) - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (tr(y) - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let palette = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    );
    for (k, (name, ys)) in series.iter().enumerate() {
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| finite(x) && finite(y))
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" points=\"{}\"><title>{name}</title></polyline>",
            palette[k % palette.len()],
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_seventeen_significant_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        let x = std::f64::consts::PI;
        assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn config_round_trip_and_stable_hash() {
        let text = r#"{"subcommand": "tails", "parameters": {"gamma": 0.0, "delta": 1.0}, "seed": 7}"#;
        let cfgs = parse_configs(text).unwrap();
        let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfgs[0]).unwrap()).unwrap();
        assert_eq!(cfgs[0], again);
        assert_eq!(cfgs[0].hash(), again.hash());
        assert_eq!(cfgs[0].param_f64("delta"), Some(1.0));
    }

    #[test]
    fn csv_differs_only_in_timestamp() {
        let mut t = ResultTable::new("demo", &["n", "value"]);
        t.push(vec![1i64.into(), 0.5.into()]);
        let a = t.clone().with_provenance("abc", 1, "2026-01-01T00:00:00Z").to_csv();
        let b = t.with_provenance("abc", 1, "2026-06-01T12:00:00Z").to_csv();
        assert_ne!(a, b);
        assert_eq!(strip_timestamps(&a), strip_timestamps(&b));
        assert!(a.lines().all(|l| l.starts_with('#') || l.contains(',')));
    }

    #[test]
    fn text_with_commas_is_quoted() {
        let mut t = ResultTable::new("t", &["a", "b"]);
        t.push(vec!["x, \"y\"".into(), 1i64.into()]);
        assert!(t.to_csv().ends_with("\"x, \"\"y\"\"\",1\n"));
    }

    #[test]
    fn plot_data_has_whitespace_columns_and_svg() {
        let mut t = ResultTable::new("decay", &["N", "S"]);
        for k in 1..5 {
            t.push(vec![(k as f64).into(), (1.0 / k as f64).into()]);
        }
        t.note("slope", -1.0);
        t.note("intercept", 0.0);
        let p = emit_plot_data(&t, PlotKind::LogLog).unwrap();
        assert_eq!(p.files.len(), 3);
        assert!(p.files[0].1.lines().nth(1).unwrap().split_whitespace().count() == 2);
        assert!(p.files[2].1.starts_with("<svg"));
    }
}
