//! `ingham`: every experiment as a subcommand, plus `run` for config files.
//!
//! Exit codes: 0 on success, 2 when a numerical check fails, 1 on errors.

mod commands;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use curved_ingham::riesz::DEFAULT_SEED;
use curved_ingham::table::{emit_plot_data, parse_configs, ExperimentConfig, PlotKind};
use serde_json::Value;

use commands::{Command, Outcome};

#[derive(Parser, Debug)]
#[command(name = "ingham", version, about = "Ingham-type inequality experiments along curves", args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Global {
    /// JSON experiment file. `run` executes every entry; any other
    /// subcommand takes its defaults from the entry with its name.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Accepted for compatibility; the computations are sequential.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write one file per table here instead of printing to stdout.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Validate the inputs and stop before computing.
    #[arg(long, global = true)]
    pub dry_run: bool,
    /// Also write plot data (`.dat`) and an SVG preview per table; needs `--out-dir`.
    #[arg(long, global = true)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    match real_main(argv) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn parse(argv: &[String]) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        }
    })
}

fn real_main(argv: Vec<String>) -> Result<ExitCode, String> {
    let cli = match parse(&argv) {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    if matches!(cli.command, Command::Run) {
        let path = cli.global.config.clone().ok_or("run needs --config")?;
        return run_file(&path, &cli.global);
    }
    // a config entry for this subcommand supplies defaults; explicit flags win
    let (cli, config) = match &cli.global.config {
        Some(path) => {
            let name = cli.command.name();
            let configs = read_configs(&path.clone())?;
            let entry = configs
                .into_iter()
                .find(|c| c.subcommand == name)
                .ok_or_else(|| format!("{} has no entry for {name}", path.display()))?;
            let pos = argv.iter().position(|a| a == name).ok_or("subcommand not found in arguments")?;
            let explicit = &argv[pos + 1..];
            let mut merged = argv[..=pos].to_vec();
            // list flags append rather than override, so drop the config's copy
            for (flag, values) in flag_groups(&entry.parameters)? {
                if !explicit.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
                    merged.push(flag);
                    merged.extend(values);
                }
            }
            if cli.global.seed.is_none() {
                merged.extend(["--seed".to_string(), entry.seed.to_string()]);
            }
            merged.extend(argv[pos + 1..].iter().cloned());
            match parse(&merged) {
                Ok(c) => (c, entry),
                Err(code) => return Ok(code),
            }
        }
        None => {
            let tail: Vec<Value> = argv[1..].iter().map(|a| Value::String(a.clone())).collect();
            let mut parameters = serde_json::Map::new();
            parameters.insert("argv".into(), Value::Array(tail));
            let config = ExperimentConfig {
                subcommand: cli.command.name().to_string(),
                parameters,
                seed: cli.global.seed.unwrap_or(DEFAULT_SEED),
                outputs: vec![],
            };
            (cli, config)
        }
    };
    let outcome = execute(&cli, &config, "")?;
    Ok(exit_code(&outcome))
}

fn read_configs(path: &PathBuf) -> Result<Vec<ExperimentConfig>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_configs(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Renders a parameter map as command-line flags: `{"N": 20}` becomes
/// `--N 20`, arrays become comma lists, `true` becomes a bare flag.
fn param_flags(params: &serde_json::Map<String, Value>) -> Result<Vec<String>, String> {
    Ok(flag_groups(params)?.into_iter().flat_map(|(f, v)| std::iter::once(f).chain(v)).collect())
}

fn flag_groups(params: &serde_json::Map<String, Value>) -> Result<Vec<(String, Vec<String>)>, String> {
    let scalar = |key: &str, v: &Value| -> Result<String, String> {
        match v {
            Value::Number(n) => Ok(n.to_string()),
            Value::String(s) => Ok(s.clone()),
            Value::Bool(b) => Ok(b.to_string()),
            other => Err(format!("parameter {key}: unsupported list element {other}")),
        }
    };
    let mut out = Vec::new();
    for (key, v) in params {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push((flag, vec![])),
            Value::Array(items) => {
                let parts = items.iter().map(|x| scalar(key, x)).collect::<Result<Vec<_>, _>>()?;
                out.push((flag, vec![parts.join(",")]));
            }
            Value::Object(_) => out.push((flag, vec![v.to_string()])),
            _ => out.push((flag, vec![scalar(key, v)?])),
        }
    }
    Ok(out)
}

fn run_file(path: &PathBuf, global: &Global) -> Result<ExitCode, String> {
    let configs = read_configs(path)?;
    let mut code = ExitCode::SUCCESS;
    let mut failed = false;
    for (i, entry) in configs.iter().enumerate() {
        if entry.subcommand == "run" {
            return Err(format!("{} entry {i}: run cannot be nested", path.display()));
        }
        let mut argv = vec!["ingham".to_string(), entry.subcommand.clone()];
        argv.extend(param_flags(&entry.parameters).map_err(|e| format!("{} entry {i}: {e}", path.display()))?);
        argv.extend(["--seed".to_string(), global.seed.unwrap_or(entry.seed).to_string()]);
        argv.extend(["--format".to_string(), format!("{:?}", global.format).to_lowercase()]);
        if let Some(dir) = &global.out_dir {
            argv.extend(["--out-dir".to_string(), dir.display().to_string()]);
        }
        if global.dry_run {
            argv.push("--dry-run".into());
        }
        if global.plot {
            argv.push("--plot".into());
        }
        let cli = Cli::try_parse_from(&argv)
            .map_err(|e| format!("{} entry {i} ({}): {}", path.display(), entry.subcommand, e.render()))?;
        let prefix = if configs.len() > 1 { format!("{i:02}_") } else { String::new() };
        let outcome = execute(&cli, entry, &prefix)?;
        failed |= !outcome.failures.is_empty();
    }
    if failed {
        code = ExitCode::from(2);
    }
    Ok(code)
}

fn exit_code(outcome: &Outcome) -> ExitCode {
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn execute(cli: &Cli, config: &ExperimentConfig, prefix: &str) -> Result<Outcome, String> {
    let g = &cli.global;
    if g.plot && g.out_dir.is_none() {
        return Err("--plot needs --out-dir".into());
    }
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let mut outcome = commands::execute(&cli.command, seed, g.dry_run)?;
    if g.dry_run {
        println!("{}: inputs valid", cli.command.name());
        return Ok(outcome);
    }
    let hash = config.hash();
    let stamp = timestamp();
    for t in outcome.tables.iter_mut() {
        *t = t.clone().with_provenance(&hash, seed, &stamp);
    }
    match &g.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            let write = |name: &str, text: &str| {
                let path = dir.join(format!("{prefix}{name}"));
                fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
                println!("wrote {}", path.display());
                Ok::<_, String>(())
            };
            for t in &outcome.tables {
                match g.format {
                    Format::Csv => write(&format!("{}.csv", t.name), &t.to_csv())?,
                    Format::Json => write(&format!("{}.json", t.name), &t.to_json())?,
                }
                if g.plot {
                    let kind = if t.summary.contains_key("slope") { PlotKind::LogLog } else { PlotKind::Lines };
                    // tables without two numeric columns have nothing to plot
                    if let Ok(plot) = emit_plot_data(t, kind) {
                        for (name, text) in &plot.files {
                            write(name, text)?;
                        }
                    }
                }
            }
            for (name, text) in &outcome.files {
                write(name, text)?;
            }
        }
        None => {
            for t in &outcome.tables {
                match g.format {
                    Format::Csv => print!("{}", t.to_csv()),
                    Format::Json => print!("{}", t.to_json()),
                }
            }
        }
    }
    for f in &outcome.failures {
        eprintln!("check failed: {f}");
    }
    Ok(outcome)
}

/// UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
fn timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0) as i64;
    let (days, rem) = (secs.div_euclid(86_400), secs.rem_euclid(86_400));
    // civil-from-days (proleptic Gregorian)
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!("{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z", rem / 3600, rem / 60 % 60, rem % 60)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters_become_flags() {
        let v: Value = serde_json::json!({"N": 20, "T_grid": [1, 2.5], "all": true, "skip": false, "name": "x"});
        let flags = param_flags(v.as_object().unwrap()).unwrap();
        assert_eq!(flags, ["--N", "20", "--T-grid", "1,2.5", "--all", "--name", "x"]);
    }

    #[test]
    fn timestamp_shape() {
        let t = timestamp();
        assert_eq!(t.len(), 20);
        assert!(t.ends_with('Z') && t.as_bytes()[10] == b'T');
    }
}
