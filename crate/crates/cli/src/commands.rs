use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use curved_ingham::acceptance::{run_all, run_criterion, tail_n_grid, TAIL_M_SET};
use curved_ingham::classify::{boundary_parametrization, region_grid, BoundaryBranch, PairTag};
use curved_ingham::curves::{
    build_curve, validate_h_alpha, CurveKind, CurveSpec, MeasureFile, MeasureKind, MeasureSpec, MIN_RESOLUTION,
};
use curved_ingham::linalg::{hermitian_eigen, C64};
use curved_ingham::oscint::{oscillatory_integral, vdc_theoretical_bound};
use curved_ingham::riesz::{
    gram_matrix, highfreq_bounds, highfreq_s_sweep, ingham_sweep, merged_bound_experiment, minimal_time_counterexample,
    riesz_bounds, sharpness_sum, ExpSystem, GramFile, GramMatrix, DEFAULT_WINDOW,
};
use curved_ingham::rigidity::{
    n1_vanishing_classifier, three_point_test, wronskian_fd, wronskian_n1, zero_set_probe, LowFreqSystem,
    ObservationCurveGamma,
};
use curved_ingham::schrodinger::{
    convergence_study, evolve, recommended_dt, trace_bound_experiment, PotentialSpec, TorusState,
};
use curved_ingham::sums::{inf_witness, sup_m, tail_decay_fit, tail_sum};
use curved_ingham::table::{Cell, ResultTable};

/// What a subcommand produced: tables, extra files for `--out-dir`, and
/// the numerical checks that failed.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<ResultTable>,
    pub files: Vec<(String, String)>,
    pub failures: Vec<String>,
}

type Res<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c(x: impl Into<Cell>) -> Cell {
    x.into()
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check the growth and curvature hypothesis on a curve.
    ValidateCurve(ValidateCurve),
    /// One oscillatory integral I_{n,m}(T).
    Integral(Integral),
    /// Good/bad classification of index pairs, with an SVG picture.
    Classify(ClassifyArgs),
    /// Sample the four branches of the bad-region boundary.
    Boundary(BoundaryArgs),
    /// Supremum scan of |n-m| / ||n|^s - |m|^s|^gamma.
    Lemma21(Lemma21),
    /// Tail sums and their decay exponent.
    Tails(Tails),
    /// Gram matrix of the exponential system on a curve.
    Gram(GramArgs),
    /// Riesz bounds of a Gram matrix with random-vector checks.
    Riesz(RieszArgs),
    /// lambda_min and lambda_max over a grid of observation times.
    InghamSweep(InghamSweepArgs),
    /// Short-time counterexample ratios.
    MinimalTime(MinimalTime),
    /// High-frequency Riesz bounds for a measure.
    Highfreq(Highfreq),
    /// Growth exponent of the sharpness sum.
    Sharpness(Sharpness),
    /// Low/high frequency coupling as s grows.
    Merged(Merged),
    /// Wronskian of the three lowest exponentials along t = gamma(x).
    Wronskian(WronskianArgs),
    /// Rank test for three points.
    Threepoint(Threepoint),
    /// Zero-set probe of a low-frequency combination along a curve.
    Zeroprobe(Zeroprobe),
    /// Split-step evolution on the torus, convergence study and traces.
    Schrodinger(Schrodinger),
    /// The numbered acceptance criteria.
    Acceptance(Acceptance),
    /// Execute every entry of the `--config` file.
    Run,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ValidateCurve(_) => "validate-curve",
            Command::Integral(_) => "integral",
            Command::Classify(_) => "classify",
            Command::Boundary(_) => "boundary",
            Command::Lemma21(_) => "lemma21",
            Command::Tails(_) => "tails",
            Command::Gram(_) => "gram",
            Command::Riesz(_) => "riesz",
            Command::InghamSweep(_) => "ingham-sweep",
            Command::MinimalTime(_) => "minimal-time",
            Command::Highfreq(_) => "highfreq",
            Command::Sharpness(_) => "sharpness",
            Command::Merged(_) => "merged",
            Command::Wronskian(_) => "wronskian",
            Command::Threepoint(_) => "threepoint",
            Command::Zeroprobe(_) => "zeroprobe",
            Command::Schrodinger(_) => "schrodinger",
            Command::Acceptance(_) => "acceptance",
            Command::Run => "run",
        }
    }
}

pub fn execute(cmd: &Command, seed: u64, dry: bool) -> Res<Outcome> {
    match cmd {
        Command::ValidateCurve(a) => a.exec(dry),
        Command::Integral(a) => a.exec(dry),
        Command::Classify(a) => a.exec(dry),
        Command::Boundary(a) => a.exec(dry),
        Command::Lemma21(a) => a.exec(dry),
        Command::Tails(a) => a.exec(dry),
        Command::Gram(a) => a.exec(dry),
        Command::Riesz(a) => a.exec(seed, dry),
        Command::InghamSweep(a) => a.exec(dry),
        Command::MinimalTime(a) => a.exec(dry),
        Command::Highfreq(a) => a.exec(dry),
        Command::Sharpness(a) => a.exec(dry),
        Command::Merged(a) => a.exec(dry),
        Command::Wronskian(a) => a.exec(dry),
        Command::Threepoint(a) => a.exec(dry),
        Command::Zeroprobe(a) => a.exec(dry),
        Command::Schrodinger(a) => a.exec(seed, dry),
        Command::Acceptance(a) => a.exec(seed, dry),
        Command::Run => Err("run is handled by the driver".into()),
    }
}

fn done(tables: Vec<ResultTable>) -> Res<Outcome> {
    Ok(Outcome { tables, ..Default::default() })
}

// ---------------------------------------------------------------------------
// shared inputs
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Curve as JSON, e.g. {"kind":"monomial","params":{"a":0,"b":1,"alpha":2}}.
    #[arg(long)]
    curve: Option<String>,
    /// File holding the same JSON.
    #[arg(long)]
    curve_file: Option<PathBuf>,
    /// Shorthand for p(t) = t^alpha (the default, with alpha = 2).
    #[arg(long)]
    alpha: Option<f64>,
}

impl CurveArgs {
    fn build(&self) -> Res<CurveSpec> {
        let given = [self.curve.is_some(), self.curve_file.is_some(), self.alpha.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err("give at most one of --curve, --curve-file, --alpha".into());
        }
        let kind: CurveKind = if let Some(text) = &self.curve {
            serde_json::from_str(text).map_err(|e| format!("--curve: {e}"))?
        } else if let Some(path) = &self.curve_file {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        } else {
            CurveKind::Monomial { a: 0.0, b: 1.0, alpha: self.alpha.unwrap_or(2.0) }
        };
        build_curve(kind).map_err(err)
    }
}

#[derive(Args, Debug, Clone)]
pub struct GammaArgs {
    /// Curve t = gamma(x) as JSON, e.g. {"kind":"affine","params":{"beta":0.3,"slope":1}}.
    #[arg(long)]
    gamma_curve: Option<String>,
    /// Polynomial coefficients of gamma, lowest degree first (default x^2).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    poly: Option<Vec<f64>>,
}

impl GammaArgs {
    fn build(&self, t_end: f64) -> Res<ObservationCurveGamma> {
        let g = match (&self.gamma_curve, &self.poly) {
            (Some(_), Some(_)) => return Err("give at most one of --gamma-curve, --poly".into()),
            (Some(text), None) => serde_json::from_str(text).map_err(|e| format!("--gamma-curve: {e}"))?,
            (None, Some(coeffs)) => ObservationCurveGamma::Polynomial { coeffs: coeffs.clone() },
            (None, None) => ObservationCurveGamma::Polynomial { coeffs: vec![0.0, 0.0, 1.0] },
        };
        g.validate(t_end).map_err(err)?;
        Ok(g)
    }
}

fn positive(name: &str, v: f64) -> Res<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be positive, got {v}"))
    }
}

fn complex_pairs(name: &str, v: &[f64]) -> Res<Vec<C64>> {
    if v.len() % 2 != 0 {
        return Err(format!("{name} takes re,im pairs"));
    }
    Ok(v.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug, Clone)]
pub struct ValidateCurve {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 2000)]
    grid: usize,
}

impl ValidateCurve {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        let curve = self.curve.build()?;
        positive("T", self.t)?;
        if dry {
            return Ok(Outcome::default());
        }
        let r = validate_h_alpha(&curve, self.t, self.grid).map_err(err)?;
        let mut t = ResultTable::new("h_alpha", &["inequality", "holds", "worst_ratio", "at"]);
        for (name, chk) in [("lower", r.lower), ("upper", r.upper), ("curvature", r.curvature)] {
            t.push(vec![c(name), c(chk.holds), c(chk.worst_ratio), c(chk.at)]);
        }
        t.note("holds", r.holds);
        t.note("monotone", r.monotone);
        t.note("alpha", curve.alpha);
        t.note("c1", curve.c1);
        t.note("c2", curve.c2);
        t.note("c3", curve.c3);
        let failures = if r.holds { vec![] } else { vec![format!("hypothesis fails on [0, {}]", self.t)] };
        Ok(Outcome { tables: vec![t], files: vec![], failures })
    }
}

#[derive(Args, Debug, Clone)]
pub struct Integral {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Also report the van der Corput bound for this eta.
    #[arg(long)]
    eta: Option<f64>,
}

impl Integral {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        let curve = self.curve.build()?;
        positive("T", self.t)?;
        positive("tol", self.tol)?;
        if dry {
            return Ok(Outcome::default());
        }
        let q = oscillatory_integral(self.n, self.m, self.s, &curve, self.t, self.tol).map_err(err)?;
        let mut t = ResultTable::new(
            "integral",
            &["n", "m", "s", "T", "re", "im", "abs_error_estimate", "panels", "stationary_points"],
        );
        t.push(vec![
            c(self.n),
            c(self.m),
            c(self.s),
            c(self.t),
            c(q.value.re),
            c(q.value.im),
            c(q.abs_error_estimate),
            c(q.panels),
            c(q.stationary_points.len()),
        ]);
        if let Some(eta) = self.eta {
            match vdc_theoretical_bound(self.n, self.m, self.s, &curve, self.t, eta).map_err(err)? {
                Some(b) => t.note("vdc_bound", b),
                None => t.note("vdc_bound", "not applicable"),
            }
        }
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct ClassifyArgs {
    #[arg(long, default_value_t = 1.5)]
    s: f64,
    #[arg(long, default_value_t = 4.0)]
    tau: f64,
    #[arg(long = "N", default_value_t = 50)]
    n: i64,
}

impl ClassifyArgs {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        positive("s", self.s)?;
        positive("tau", self.tau)?;
        if self.n < 1 {
            return Err("N must be at least 1".into());
        }
        if dry {
            return Ok(Outcome::default());
        }
        let grid = region_grid(self.s, self.tau, self.n);
        let mut t = ResultTable::new("region", &["n", "m", "tag", "ratio"]);
        for p in &grid.cells {
            t.push(vec![c(p.n), c(p.m), c(p.tag.as_str()), c(p.ratio.unwrap_or(f64::NAN))]);
        }
        for tag in [PairTag::Diagonal, PairTag::AntiDiagonal, PairTag::GoodPlus, PairTag::GoodMinus, PairTag::Bad] {
            t.note(tag.as_str(), grid.count(tag));
        }
        Ok(Outcome { tables: vec![t], files: vec![("region.svg".into(), grid.to_svg(6))], failures: vec![] })
    }
}

#[derive(Args, Debug, Clone)]
pub struct BoundaryArgs {
    /// Points per branch.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

impl BoundaryArgs {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        if self.samples == 0 {
            return Err("samples must be positive".into());
        }
        if dry {
            return Ok(Outcome::default());
        }
        let mut t = ResultTable::new("boundary", &["branch", "param", "x", "y", "residual"]);
        let mut worst: f64 = 0.0;
        for b in BoundaryBranch::ALL {
            let (lo, hi) = b.domain();
            for k in 0..self.samples {
                let th = lo + (hi - lo) * (k as f64 + 0.5) / self.samples as f64;
                let p = boundary_parametrization(b, th).map_err(err)?;
                let scale = 1f64.max(p.x.abs().powf(1.5) + p.y.abs().powf(1.5));
                worst = worst.max(p.residual.abs() / scale);
                t.push(vec![c(format!("{b:?}")), c(th), c(p.x), c(p.y), c(p.residual)]);
            }
        }
        t.note("max_relative_residual", worst);
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct Lemma21 {
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long = "N", default_value_t = 1000)]
    n: i64,
}

impl Lemma21 {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        if self.n < 2 {
            return Err("N must be at least 2".into());
        }
        if dry {
            return Ok(Outcome::default());
        }
        let scan = sup_m(self.gamma, self.s, self.n).map_err(err)?;
        let mut t = ResultTable::new("sup_running", &["K", "sup"]);
        for (k, v) in &scan.running {
            t.push(vec![c(*k), c(*v)]);
        }
        t.note("sup", scan.sup_value);
        t.note("argmax", format!("({}, {})", scan.argmax.0, scan.argmax.1));
        if let Some(f) = &scan.growth_fit {
            t.note("slope", f.slope);
            t.note("intercept", f.intercept);
        }
        let w = inf_witness(self.gamma, self.s, self.n).map_err(err)?;
        let mut tw = ResultTable::new("inf_witness", &["m", "ratio"]);
        for (m, r) in w.ms.iter().zip(&w.ratios) {
            tw.push(vec![c(*m), c(*r)]);
        }
        tw.note("path", w.path.as_str());
        tw.note("tenfold_drop", w.tenfold_drop);
        done(vec![t, tw])
    }
}

#[derive(Args, Debug, Clone)]
pub struct Tails {
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 2.5)]
    s: f64,
    /// Tail starts for the decay fit (default: 10^4 to 10^5.5).
    #[arg(long = "N-grid", value_delimiter = ',')]
    n_grid: Option<Vec<i64>>,
    #[arg(long = "m-set", value_delimiter = ',', allow_hyphen_values = true)]
    m_set: Option<Vec<i64>>,
    /// Evaluate the single sum S_m(N) instead of the fit.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long = "N", default_value_t = 0)]
    start: i64,
    #[arg(long)]
    horizon: Option<i64>,
}

impl Tails {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        if dry {
            return Ok(Outcome::default());
        }
        if let Some(m) = self.m {
            let r = tail_sum(self.gamma, self.delta, self.s, m, self.start, self.horizon).map_err(err)?;
            let mut t = ResultTable::new("tail_sum", &["m", "N", "value", "remainder_bound", "terms", "horizon"]);
            t.push(vec![c(m), c(self.start), c(r.value), c(r.remainder_bound), c(r.terms), c(r.horizon)]);
            return done(vec![t]);
        }
        let grid = self.n_grid.clone().unwrap_or_else(tail_n_grid);
        let m_set = self.m_set.clone().unwrap_or_else(|| TAIL_M_SET.to_vec());
        let f = tail_decay_fit(self.gamma, self.delta, self.s, &grid, &m_set).map_err(err)?;
        let mut t = ResultTable::new("tail_decay", &["N", "sup_m_S_m"]);
        for (n, v) in f.n_grid.iter().zip(&f.sup_values) {
            t.push(vec![c(*n), c(*v)]);
        }
        t.note("slope", f.fit.slope);
        t.note("intercept", f.fit.intercept);
        t.note("sigma_expected", f.sigma_expected);
        t.note("within_tolerance", f.within_tolerance);
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    /// Indices run over -N..N.
    #[arg(long = "N", default_value_t = 20)]
    n: i64,
    #[arg(long = "T", default_value_t = 3.0)]
    t: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl SystemArgs {
    fn build(&self) -> Res<ExpSystem> {
        let curve = self.curve.build()?;
        positive("T", self.t)?;
        positive("tol", self.tol)?;
        ExpSystem::symmetric_on_curve(self.n, self.s, curve, self.t).map_err(err)
    }
}

fn spectrum_table(g: &GramMatrix) -> ResultTable {
    let eig = hermitian_eigen(&g.entries);
    let mut t = ResultTable::new("gram_spectrum", &["k", "eigenvalue"]);
    for (k, v) in eig.values.iter().enumerate() {
        t.push(vec![c(k), c(*v)]);
    }
    t
}

#[derive(Args, Debug, Clone)]
pub struct GramArgs {
    #[command(flatten)]
    system: SystemArgs,
}

impl GramArgs {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        let sys = self.system.build()?;
        if dry {
            return Ok(Outcome::default());
        }
        let g = gram_matrix(&sys, self.system.tol).map_err(err)?;
        let file = serde_json::to_string_pretty(&g.to_file()).map_err(err)?;
        Ok(Outcome { tables: vec![spectrum_table(&g)], files: vec![("gram.json".into(), file)], failures: vec![] })
    }
}

#[derive(Args, Debug, Clone)]
pub struct RieszArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Read the Gram matrix from a file written by `gram` instead.
    #[arg(long)]
    gram_file: Option<PathBuf>,
}

impl RieszArgs {
    fn exec(&self, seed: u64, dry: bool) -> Res<Outcome> {
        let g = match &self.gram_file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                let f: GramFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                Some(GramMatrix::from_file(&f, 0.0).map_err(err)?)
            }
            None => {
                let sys = self.system.build()?;
                if dry {
                    None
                } else {
                    Some(gram_matrix(&sys, self.system.tol).map_err(err)?)
                }
            }
        };
        let Some(g) = g.filter(|_| !dry) else { return Ok(Outcome::default()) };
        let r = riesz_bounds(&g, seed).map_err(err)?;
        let mut t = ResultTable::new(
            "riesz",
            &[
                "dim",
                "lambda_min",
                "lambda_max",
                "normalized_min",
                "normalized_max",
                "sandwich_passed",
                "sandwich_total",
            ],
        );
        t.push(vec![
            c(g.indices.len()),
            c(r.lambda_min),
            c(r.lambda_max),
            c(r.normalized.0),
            c(r.normalized.1),
            c(r.random_vector_checks),
            c(r.random_vectors),
        ]);
        if let Some(d) = r.charpoly_deviation {
            t.note("charpoly_deviation", d);
        }
        let failures = if r.sandwich_ok() {
            vec![]
        } else {
            vec![format!(
                "{} of {} random vectors left the eigenvalue sandwich",
                r.random_vectors - r.random_vector_checks,
                r.random_vectors
            )]
        };
        Ok(Outcome { tables: vec![t], files: vec![], failures })
    }
}

#[derive(Args, Debug, Clone)]
pub struct InghamSweepArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long = "N", default_value_t = 20)]
    n: i64,
    #[arg(long = "T-grid", value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0])]
    t_grid: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl InghamSweepArgs {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        let curve = self.curve.build()?;
        for &t in &self.t_grid {
            positive("T", t)?;
        }
        if dry {
            return Ok(Outcome::default());
        }
        let sw = ingham_sweep(&curve, self.s, self.n, &self.t_grid, self.tol).map_err(err)?;
        let mut t = ResultTable::new("ingham_sweep", &["T", "lambda_min", "lambda_max"]);
        for r in &sw.rows {
            t.push(vec![c(r.t), c(r.lambda_min), c(r.lambda_max)]);
        }
        t.note("monotone", sw.monotone);
        t.note("t_empirical", sw.t_empirical.unwrap_or(f64::NAN));
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct MinimalTime {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long = "j-grid", value_delimiter = ',', default_values_t = [2i64, 5, 10, 50, 200])]
    j_grid: Vec<i64>,
}

impl MinimalTime {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        let curve = self.curve.build()?;
        if dry {
            return Ok(Outcome::default());
        }
        let rows = minimal_time_counterexample(&curve, self.s, curve.alpha, &self.j_grid).map_err(err)?;
        let mut t = ResultTable::new("minimal_time", &["j", "T_j", "ratio", "gram_ratio", "coefficient_norm_sq"]);
        for r in &rows {
            t.push(vec![c(r.j), c(r.t_j), c(r.ratio), c(r.gram_ratio), c(r.coefficient_norm_sq)]);
        }
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct Highfreq {
    /// Measure as JSON, e.g. {"kind":"circle_arc","params":{"radius":1,"start":0,"sweep":1.5707963267948966}}
    /// (default: the quarter circle of radius 1).
    #[arg(long)]
    measure: Option<String>,
    /// Measure exchange file (`kind`, `params`).
    #[arg(long)]
    measure_file: Option<PathBuf>,
    #[arg(long, default_value_t = 2.5)]
    s: f64,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: i64,
    #[arg(long = "N-grid", value_delimiter = ',', default_values_t = [2i64, 4, 8, 16, 32, 64, 128, 200])]
    n_grid: Vec<i64>,
    /// Evaluate every grid point instead of stopping at the first success.
    #[arg(long)]
    all: bool,
    /// Sweep s at the fixed lowest index `--N` instead.
    #[arg(long = "s-grid", value_delimiter = ',')]
    s_grid: Option<Vec<f64>>,
    #[arg(long = "N", default_value_t = 16)]
    n: i64,
}

impl Highfreq {
    fn kind(&self) -> Res<MeasureKind> {
        match (&self.measure, &self.measure_file) {
            (Some(_), Some(_)) => Err("give at most one of --measure, --measure-file".into()),
            (Some(text), None) => serde_json::from_str(text).map_err(|e| format!("--measure: {e}")),
            (None, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                let f: MeasureFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                MeasureSpec::from_file(&f, MIN_RESOLUTION)
                    .map_err(err)?
                    .kind
                    .ok_or_else(|| "atomic measures need a kind for resolution control".to_string())
            }
            (None, None) => Ok(MeasureKind::CircleArc { radius: 1.0, start: 0.0, sweep: FRAC_PI_2 }),
        }
    }

    fn exec(&self, dry: bool) -> Res<Outcome> {
        let kind = self.kind()?;
        MeasureSpec::new(kind.clone(), MIN_RESOLUTION).map_err(err)?;
        if dry {
            return Ok(Outcome::default());
        }
        if let Some(s_grid) = &self.s_grid {
            let rows = highfreq_s_sweep(&kind, self.n, s_grid, self.window).map_err(err)?;
            let mut t = ResultTable::new("highfreq_s_sweep", &["s", "lambda_min", "lambda_max"]);
            for r in &rows {
                t.push(vec![c(r.s), c(r.lambda_min), c(r.lambda_max)]);
            }
            t.note("N", self.n);
            return done(vec![t]);
        }
        let rep = highfreq_bounds(&kind, self.s, &self.n_grid, self.window, !self.all).map_err(err)?;
        let mut t = ResultTable::new("highfreq", &["N", "lambda_min", "lambda_max", "nodes", "within"]);
        for r in &rep.rows {
            t.push(vec![c(r.n), c(r.lambda_min), c(r.lambda_max), c(r.nodes), c(r.within)]);
        }
        t.note("delta_hat", rep.delta_hat);
        t.note("eta_hat", rep.eta_hat);
        t.note("decay_too_weak", rep.decay_too_weak);
        t.note("n_empirical", rep.n_empirical.map(|n| n.to_string()).unwrap_or_else(|| "none".into()));
        if rep.decay_too_weak {
            eprintln!("warning: measured decay gives s * delta <= 1; the bounds need not hold");
        }
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct Sharpness {
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 1.5)]
    s: f64,
    #[arg(long = "N-grid", value_delimiter = ',', default_values_t = [32i64, 64, 128, 256, 512, 1024])]
    n_grid: Vec<i64>,
}

impl Sharpness {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        if dry {
            return Ok(Outcome::default());
        }
        let r = sharpness_sum(self.delta, self.s, &self.n_grid).map_err(err)?;
        let mut t = ResultTable::new("sharpness", &["N", "S_N"]);
        for (n, v) in r.n_grid.iter().zip(&r.sums) {
            t.push(vec![c(*n), c(*v)]);
        }
        t.note("slope", r.fit.slope);
        t.note("intercept", r.fit.intercept);
        t.note("expected_slope", r.expected_slope);
        t.note("transform_check", r.transform_check);
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct Merged {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long = "N", default_value_t = 10)]
    n: i64,
    #[arg(long = "s-grid", value_delimiter = ',', default_values_t = [3.0, 4.0, 5.0, 6.0, 7.0, 8.0])]
    s_grid: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl Merged {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        let curve = self.curve.build()?;
        positive("T", self.t)?;
        if dry {
            return Ok(Outcome::default());
        }
        let rows = merged_bound_experiment(&curve, self.t, self.n, &self.s_grid, self.tol).map_err(err)?;
        let mut t = ResultTable::new("merged", &["s", "lambda_min", "lambda_max", "coupling", "decay_product"]);
        for r in &rows {
            t.push(vec![c(r.s), c(r.lambda_min), c(r.lambda_max), c(r.coupling), c(r.decay_product)]);
        }
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct WronskianArgs {
    #[command(flatten)]
    gamma: GammaArgs,
    /// Evaluation points in [0, 1].
    #[arg(long, default_value_t = 11)]
    points: usize,
    /// Step of the finite-difference determinant.
    #[arg(long, default_value_t = 1e-5)]
    h: f64,
}

impl WronskianArgs {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        let g = self.gamma.build(1.0)?;
        if self.points < 2 {
            return Err("points must be at least 2".into());
        }
        if dry {
            return Ok(Outcome::default());
        }
        let mut t = ResultTable::new("wronskian", &["x", "w_re", "w_im", "fd_re", "fd_im", "relative_difference"]);
        for k in 0..self.points {
            let x = k as f64 / (self.points - 1) as f64;
            let w = wronskian_n1(&g, x);
            let f = wronskian_fd(&g, x, self.h);
            let rel = if w.norm() > 0.0 { (w - f).norm() / w.norm() } else { f.norm() };
            t.push(vec![c(x), c(w.re), c(w.im), c(f.re), c(f.im), c(rel)]);
        }
        let samples: Vec<f64> = (0..self.points).map(|k| (k as f64 + 0.5) / self.points as f64).collect();
        let cl = n1_vanishing_classifier(&g, &samples).map_err(err)?;
        t.note("case", format!("{:?}", cl.case));
        t.note("parameter", cl.parameter);
        t.note("relation", cl.relation.as_str());
        let witness: Vec<String> = cl.witness.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
        t.note("witness", witness.join(" "));
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct Threepoint {
    /// t1,x1,t2,x2,t3,x3
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1..)]
    points: Vec<f64>,
    /// Optional c_-1, c_0, c_1 as re,im pairs.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
}

impl Threepoint {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        if self.points.len() != 6 {
            return Err(format!("--points takes six numbers, got {}", self.points.len()));
        }
        let p = [[self.points[0], self.points[1]], [self.points[2], self.points[3]], [self.points[4], self.points[5]]];
        let cs = match &self.coeffs {
            Some(v) => {
                let z = complex_pairs("--coeffs", v)?;
                if z.len() != 3 {
                    return Err("--coeffs takes three complex numbers".into());
                }
                Some([z[0], z[1], z[2]])
            }
            None => None,
        };
        if dry {
            return Ok(Outcome::default());
        }
        let r = three_point_test(&p, cs).map_err(err)?;
        let mut t = ResultTable::new("three_point", &["rank", "residual"]);
        t.push(vec![c(r.rank), c(r.residual.unwrap_or(f64::NAN))]);
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct Zeroprobe {
    #[command(flatten)]
    gamma: GammaArgs,
    #[arg(long = "N", default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    /// The 2N+1 frequencies.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1.3, 0.4, 2.1])]
    lambdas: Vec<f64>,
    /// The 2N+1 coefficients as re,im pairs (default all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 2001)]
    grid: usize,
}

impl Zeroprobe {
    fn exec(&self, dry: bool) -> Res<Outcome> {
        let g = self.gamma.build(self.t)?;
        positive("T", self.t)?;
        let coeffs = match &self.coeffs {
            Some(v) => complex_pairs("--coeffs", v)?,
            None => vec![C64::new(1.0, 0.0); 2 * self.n + 1],
        };
        let sys = LowFreqSystem::new(self.n, self.s, self.lambdas.clone(), coeffs).map_err(err)?;
        if dry {
            return Ok(Outcome::default());
        }
        let z = zero_set_probe(&sys, &g, self.t, self.grid).map_err(err)?;
        let mut t = ResultTable::new("zero_probe", &["zero"]);
        for x in &z.zeros {
            t.push(vec![c(*x)]);
        }
        t.note("max_abs", z.max_abs);
        t.note("min_abs", z.min_abs);
        t.note("verdict", format!("{:?}", z.verdict));
        done(vec![t])
    }
}

#[derive(Args, Debug, Clone)]
pub struct Schrodinger {
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    /// Modes -K..K are kept.
    #[arg(long = "K", default_value_t = 32)]
    k: usize,
    /// Initial data as n:re:im entries.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = ["0:1:0".to_string(), "1:0.5:0".to_string()])]
    modes: Vec<String>,
    /// `zero`, `constant:v`, `cosine:amplitude:mode`, or JSON.
    #[arg(long, default_value = "zero")]
    potential: String,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    /// Step size (default: a potential-dependent recommendation).
    #[arg(long)]
    dt: Option<f64>,
    /// Also measure the splitting order with dt, dt/2, dt/4.
    #[arg(long)]
    study: bool,
    /// Also compare traces along a curve with the coefficient norm.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    curve: CurveArgs,
    /// Random vectors in the trace comparison.
    #[arg(long, default_value_t = 8)]
    random: usize,
}

fn parse_potential(text: &str) -> Res<PotentialSpec> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| format!("--potential: {e}"));
    }
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("--potential {text}: {e}"));
    match parts.as_slice() {
        ["zero"] => Ok(PotentialSpec::Zero),
        ["constant", v] => Ok(PotentialSpec::Constant { value: num(v)? }),
        ["cosine", a, m] => Ok(PotentialSpec::Cosine {
            amplitude: num(a)?,
            mode: m.parse().map_err(|e| format!("--potential {text}: {e}"))?,
        }),
        _ => Err(format!("--potential {text}: expected zero, constant:v or cosine:a:m")),
    }
}

fn parse_modes(entries: &[String]) -> Res<Vec<(i64, C64)>> {
    entries
        .iter()
        .map(|e| {
            let p: Vec<&str> = e.split(':').collect();
            if p.len() != 3 {
                return Err(format!("mode {e}: expected n:re:im"));
            }
            let bad = |x: &str| format!("mode {e}: cannot read {x}");
            Ok((
                p[0].parse().map_err(|_| bad(p[0]))?,
                C64::new(p[1].parse().map_err(|_| bad(p[1]))?, p[2].parse().map_err(|_| bad(p[2]))?),
            ))
        })
        .collect()
}

impl Schrodinger {
    fn exec(&self, seed: u64, dry: bool) -> Res<Outcome> {
        let v = parse_potential(&self.potential)?;
        let u0 = TorusState::from_modes(&parse_modes(&self.modes)?, self.k, self.s).map_err(err)?;
        positive("T", self.t)?;
        let dt = self.dt.unwrap_or_else(|| recommended_dt(&v));
        positive("dt", dt)?;
        let curve = if self.trace { Some(self.curve.build()?) } else { None };
        if dry {
            return Ok(Outcome::default());
        }
        let run = evolve(&u0, &v, self.t, dt).map_err(err)?;
        let mut t = ResultTable::new("state", &["n", "re", "im"]);
        let k = self.k as i64;
        for n in -k..=k {
            let z = run.state.coeff(n);
            t.push(vec![c(n), c(z.re), c(z.im)]);
        }
        t.note("steps", run.steps);
        t.note("max_norm_drift", run.max_norm_drift);
        t.note("max_tail_fraction", run.max_tail_fraction);
        let mut tables = vec![t];
        if self.study {
            let st = convergence_study(&u0, &v, self.t, &[dt, dt / 2.0, dt / 4.0]).map_err(err)?;
            let mut ts = ResultTable::new("convergence", &["dt", "error"]);
            for (d, e) in st.dts.iter().zip(&st.errors) {
                ts.push(vec![c(*d), c(*e)]);
            }
            for (i, o) in st.orders.iter().enumerate() {
                ts.note(&format!("order_{i}"), *o);
            }
            tables.push(ts);
        }
        if let Some(curve) = curve {
            let r = trace_bound_experiment(&curve, self.s, &v, self.t, self.k, self.random, seed, dt).map_err(err)?;
            let mut tt = ResultTable::new("trace_bounds", &["trial", "ratio"]);
            for trial in &r.trials {
                tt.push(vec![c(trial.name.as_str()), c(trial.ratio)]);
            }
            tt.note("max_ratio", r.max_ratio);
            tt.note("min_ratio", r.min_ratio);
            tt.note("gram_lambda_min", r.gram_lambda_min);
            tables.push(tt);
        }
        done(tables)
    }
}

#[derive(Args, Debug, Clone)]
pub struct Acceptance {
    /// Criteria to run (default: all twelve).
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<u32>>,
}

impl Acceptance {
    fn exec(&self, seed: u64, dry: bool) -> Res<Outcome> {
        let ids = self.criteria.clone().unwrap_or_else(|| (1..=12).collect());
        if let Some(bad) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
            return Err(format!("no criterion {bad}"));
        }
        if dry {
            return Ok(Outcome::default());
        }
        let line = |o: &curved_ingham::acceptance::Outcome| {
            eprintln!(
                "{} criterion {:>2} ({}): {} [{:.1}s]",
                if o.passed { "PASS" } else { "FAIL" },
                o.id,
                o.title,
                o.detail,
                o.seconds
            );
        };
        let outcomes = if ids.contains(&12) {
            run_all(seed, line).into_iter().filter(|o| ids.contains(&o.id)).collect::<Vec<_>>()
        } else {
            let mut v = Vec::new();
            for &id in &ids {
                let o = run_criterion(id, seed).map_err(err)?;
                line(&o);
                v.push(o);
            }
            v
        };
        let mut summary = ResultTable::new("acceptance", &["criterion", "title", "passed", "detail"]);
        let mut tables = Vec::new();
        let mut failures = Vec::new();
        for o in outcomes {
            summary.push(vec![c(o.id as i64), c(o.title), c(o.passed), c(o.detail.as_str())]);
            if !o.passed {
                failures.push(format!("criterion {}: {}", o.id, o.detail));
            }
            for mut t in o.tables {
                t.name = format!("c{:02}_{}", o.id, t.name);
                tables.push(t);
            }
        }
        tables.insert(0, summary);
        Ok(Outcome { tables, files: vec![], failures })
    }
}
