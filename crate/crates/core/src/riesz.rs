//! Gram matrices of exponential systems `e_n(t, x) = exp(2 pi i (|n|^s t + lambda_n x))`
//! restricted to curves or measures, and the experiments built on their
//! extreme eigenvalues.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::temporal_freq;
use crate::curves::{fit_fourier_decay, mu_hat, nu_hat, phase_sin_cos, CurveSpec, MeasureKind, MeasureSpec};
use crate::error::{invalid, Error, Result};
use crate::fit::{loglog, logspace, LineFit};
use crate::linalg::{charpoly_eigenvalues, hermitian_eigen, CMatrix, C64};
use crate::oscint::{phase_integral, Weight};
use crate::quadrature::{gl20, KahanSum};

/// Default seed of the random coefficient vectors.
pub const DEFAULT_SEED: u64 = 0x1CEB_00DA;
pub const RANDOM_VECTORS: usize = 64;
pub const SANDWICH_SLACK: f64 = 1e-8;

#[derive(Debug, Clone)]
pub enum Domain {
    /// `int_0^T |F(t, p(t))|^2 w(t) dt`.
    Curve { curve: CurveSpec, t_end: f64, weight: Weight },
    /// `int |F|^2 dmu` for a probability measure.
    Measure(MeasureSpec),
}

#[derive(Debug, Clone)]
pub struct ExpSystem {
    pub indices: Vec<i64>,
    pub s: f64,
    /// `lambda_n` per index; `None` means `lambda_n = n`.
    pub spatial: Option<Vec<f64>>,
    pub domain: Domain,
}

impl ExpSystem {
    pub fn new(indices: Vec<i64>, s: f64, domain: Domain) -> Result<Self> {
        let sys = Self { indices, s, spatial: None, domain };
        sys.validate()?;
        Ok(sys)
    }

    /// Indices `-n..=n` on a curve with Lebesgue weight.
    pub fn symmetric_on_curve(n: i64, s: f64, curve: CurveSpec, t_end: f64) -> Result<Self> {
        Self::new((-n..=n).collect(), s, Domain::Curve { curve, t_end, weight: Weight::Lebesgue })
    }

    pub fn with_spatial(mut self, spatial: Vec<f64>) -> Result<Self> {
        self.spatial = Some(spatial);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.indices.is_empty() {
            return Err(invalid("empty exponential system"));
        }
        if self.indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("indices must be distinct and increasing"));
        }
        if let Some(l) = &self.spatial {
            if l.len() != self.indices.len() {
                return Err(invalid("one spatial frequency per index is required"));
            }
            let mut sorted = l.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid("spatial frequencies must be distinct"));
            }
        }
        if let Domain::Curve { t_end, .. } = &self.domain {
            if !(*t_end > 0.0) {
                return Err(invalid("observation time must be positive"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn spatial_freq(&self, k: usize) -> f64 {
        match &self.spatial {
            Some(l) => l[k],
            None => self.indices[k] as f64,
        }
    }

    pub fn temporal_freq(&self, k: usize) -> f64 {
        temporal_freq(self.indices[k], self.s)
    }

    /// `(|n|^s, lambda_n)` for every index.
    fn frequencies(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|k| [self.temporal_freq(k), self.spatial_freq(k)]).collect()
    }
}

/// `entries[(i, j)] = int e_{n_j} conj(e_{n_i})`, so that `c^H G c` is the
/// squared norm of `sum_j c_j e_{n_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub indices: Vec<i64>,
    pub entries: CMatrix,
    /// Diagonal value: `T` for the Lebesgue weight, the mass otherwise.
    pub scale: f64,
    pub tol: f64,
}

/// JSON exchange form of a Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramFile {
    pub dim: usize,
    pub indices: Vec<i64>,
    pub entries_re: Vec<Vec<f64>>,
    pub entries_im: Vec<Vec<f64>>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn quadratic_form(&self, c: &[C64]) -> f64 {
        self.entries.rayleigh(c)
    }

    pub fn to_file(&self) -> GramFile {
        let n = self.dim();
        let row = |i: usize, f: fn(&C64) -> f64| (0..n).map(|j| f(&self.entries[(i, j)])).collect();
        GramFile {
            dim: n,
            indices: self.indices.clone(),
            entries_re: (0..n).map(|i| row(i, |z| z.re)).collect(),
            entries_im: (0..n).map(|i| row(i, |z| z.im)).collect(),
        }
    }

    pub fn from_file(f: &GramFile, tol: f64) -> Result<Self> {
        let n = f.dim;
        if f.indices.len() != n || f.entries_re.len() != n || f.entries_im.len() != n {
            return Err(invalid("Gram file dimensions disagree"));
        }
        if f.entries_re.iter().chain(&f.entries_im).any(|r| r.len() != n) {
            return Err(invalid("Gram file rows have the wrong length"));
        }
        let entries = CMatrix::from_fn(n, n, |i, j| C64::new(f.entries_re[i][j], f.entries_im[i][j]));
        let scale = if n > 0 { entries[(0, 0)].re } else { 0.0 };
        Ok(Self { indices: f.indices.clone(), entries, scale, tol })
    }
}

/// Assembles the Gram matrix of `system`; the upper triangle is computed and
/// mirrored.
pub fn gram_matrix(system: &ExpSystem, tol: f64) -> Result<GramMatrix> {
    system.validate()?;
    match &system.domain {
        Domain::Curve { curve, t_end, weight } => {
            let mut g = gram_increment(system, curve, 0.0, *t_end, *weight, tol)?;
            if *weight == Weight::Lebesgue {
                for i in 0..g.rows {
                    g[(i, i)] = C64::new(*t_end, 0.0);
                }
            }
            let scale = match weight {
                Weight::Lebesgue => *t_end,
                Weight::ArcLength => curve.arc_length(*t_end),
            };
            Ok(GramMatrix { indices: system.indices.clone(), entries: g, scale, tol })
        }
        Domain::Measure(measure) => Ok(GramMatrix {
            indices: system.indices.clone(),
            entries: measure_gram(system, measure),
            scale: measure.weights.iter().sum(),
            tol,
        }),
    }
}

/// Gram matrix of the curve restricted to `a <= t <= b`.
fn gram_increment(system: &ExpSystem, curve: &CurveSpec, a: f64, b: f64, weight: Weight, tol: f64) -> Result<CMatrix> {
    let n = system.len();
    let freq = system.frequencies();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let dt = freq[j][0] - freq[i][0];
            let dx = freq[j][1] - freq[i][1];
            let v = if i == j && weight == Weight::Lebesgue {
                C64::new(b - a, 0.0)
            } else {
                phase_integral(curve, dx, dt, a, b, weight, tol)?.value
            };
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    for i in 0..n {
        g[(i, i)].im = 0.0;
    }
    Ok(g)
}

fn measure_gram(system: &ExpSystem, measure: &MeasureSpec) -> CMatrix {
    let n = system.len();
    let freq = system.frequencies();
    let mut g = CMatrix::zeros(n, n);
    if measure.factors.is_some() {
        // tensor measures: the transform itself is cheap
        for i in 0..n {
            for j in i..n {
                let v = mu_hat(measure, [freq[i][0] - freq[j][0], freq[i][1] - freq[j][1]]);
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
    } else {
        // G = E^H W E node by node, E_kj = exp(2 pi i <phi(n_j), z_k>)
        let mut e = vec![C64::new(0.0, 0.0); n];
        let mut acc = vec![C64::new(0.0, 0.0); n * (n + 1) / 2];
        for (z, w) in measure.nodes.iter().zip(&measure.weights) {
            for (ek, f) in e.iter_mut().zip(&freq) {
                let a = f[0] * z[0];
                let b = f[1] * z[1];
                let (s, c) = phase_sin_cos((a - a.round()) + (b - b.round()));
                *ek = C64::new(c, s);
            }
            let mut k = 0;
            for i in 0..n {
                let ci = e[i].conj() * *w;
                for ej in &e[i..] {
                    acc[k] += ci * ej;
                    k += 1;
                }
            }
        }
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                g[(i, j)] = acc[k];
                g[(j, i)] = acc[k].conj();
                k += 1;
            }
        }
    }
    for i in 0..n {
        g[(i, i)].im = 0.0;
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Extreme eigenvalues divided by the diagonal scale.
    pub normalized: (f64, f64),
    pub random_vector_checks: usize,
    pub random_vectors: usize,
    /// Largest distance to a characteristic-polynomial root (dimension <= 3).
    pub charpoly_deviation: Option<f64>,
    /// Unit eigenvector of `lambda_min`.
    pub min_vector: Vec<C64>,
}

impl RieszReport {
    pub fn sandwich_ok(&self) -> bool {
        self.random_vector_checks == self.random_vectors
    }
}

/// Uniform random unit vector in `C^n` (normalised cube sample).
pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Extreme eigenvalues of a Gram matrix, sandwiched by random vectors.
pub fn riesz_bounds(g: &GramMatrix, seed: u64) -> Result<RieszReport> {
    let a = &g.entries;
    let defect = a.hermitian_defect();
    if defect > 1e-12 * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    let eig = hermitian_eigen(a);
    let n = a.rows;
    let lambda_min = eig.values[0];
    let lambda_max = eig.values[n - 1];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    for _ in 0..RANDOM_VECTORS {
        let c = random_unit_vector(&mut rng, n);
        let q = a.rayleigh(&c);
        if q >= lambda_min - SANDWICH_SLACK && q <= lambda_max + SANDWICH_SLACK {
            passed += 1;
        }
    }
    let charpoly_deviation = charpoly_eigenvalues(a)
        .map(|roots| roots.iter().zip(&eig.values).map(|(r, v)| (r - v).abs()).fold(0.0, f64::max));
    let scale = if g.scale > 0.0 { g.scale } else { 1.0 };
    Ok(RieszReport {
        lambda_min,
        lambda_max,
        normalized: (lambda_min / scale, lambda_max / scale),
        random_vector_checks: passed,
        random_vectors: RANDOM_VECTORS,
        charpoly_deviation,
        min_vector: eig.vector(0),
    })
}

// ---------------------------------------------------------------------------
// Ingham sweep over observation times
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InghamSweep {
    pub rows: Vec<SweepRow>,
    /// Smallest grid `T` with `lambda_min / T >= 0.1 (lambda_min / T)` at
    /// the largest grid `T`.
    pub t_empirical: Option<f64>,
    pub monotone: bool,
}

/// Gram spectra of `{-N..N}` on `[0, T]` along an increasing grid, the Gram
/// at each `T` accumulated from the previous one.
pub fn ingham_sweep(curve: &CurveSpec, s: f64, n: i64, t_grid: &[f64], tol: f64) -> Result<InghamSweep> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) || t_grid[0] <= 0.0 {
        return Err(invalid("T grid must be positive and increasing"));
    }
    let system = ExpSystem::symmetric_on_curve(n, s, curve.clone(), t_grid[0])?;
    let dim = system.len();
    let mut g = CMatrix::zeros(dim, dim);
    let mut prev = 0.0;
    let mut rows = Vec::new();
    for &t in t_grid {
        let inc = gram_increment(&system, curve, prev, t, Weight::Lebesgue, tol)?;
        for (x, y) in g.data.iter_mut().zip(&inc.data) {
            *x += y;
        }
        prev = t;
        let eig = hermitian_eigen(&g);
        rows.push(SweepRow { t, lambda_min: eig.values[0], lambda_max: eig.values[dim - 1] });
    }
    let last = rows.last().unwrap();
    let target = 0.1 * last.lambda_min / last.t;
    let t_empirical = if target > 0.0 { rows.iter().find(|r| r.lambda_min / r.t >= target).map(|r| r.t) } else { None };
    // increments are Gram matrices, so only rounding can break monotonicity
    let monotone = rows.windows(2).all(|w| w[1].lambda_min >= w[0].lambda_min - 1e-9);
    Ok(InghamSweep { rows, t_empirical, monotone })
}

// ---------------------------------------------------------------------------
// Minimal observation time
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalTimeRow {
    pub j: i64,
    pub t_j: f64,
    pub ratio: f64,
    /// The same ratio from the Gram matrix of `{0, j}` on `[0, T_j]`.
    pub gram_ratio: f64,
    pub coefficient_norm_sq: f64,
}

/// `eps = (alpha s - 1) / (2 s)`.
pub fn minimal_time_eps(alpha: f64, s: f64) -> f64 {
    (alpha * s - 1.0) / (2.0 * s)
}

/// Ratios `(1/T_j) int_0^{T_j} |e_0 - e^{-2 pi i j p(0)} e_j|^2` with
/// `T_j = j^{-(s + eps)}`; they tend to zero, so no observability estimate
/// can hold on arbitrarily short intervals.
pub fn minimal_time_counterexample(
    curve: &CurveSpec,
    s: f64,
    alpha: f64,
    j_grid: &[i64],
) -> Result<Vec<MinimalTimeRow>> {
    let eps = minimal_time_eps(alpha, s);
    if !(eps > 0.0) {
        return Err(invalid("alpha s must exceed 1"));
    }
    let mut rows = Vec::new();
    for &j in j_grid {
        if j < 1 {
            return Err(invalid("j must be positive"));
        }
        let t_j = (j as f64).powf(-(s + eps));
        let p0 = curve.p(0.0);
        let js = temporal_freq(j, s);
        let jf = j as f64;
        // integrand |1 - e^{2 pi i Phi}|^2 = 4 sin^2(pi Phi), Phi(tau) in cycles
        let phi = |tau: f64| jf * (curve.p(t_j * tau) - p0) + js * t_j * tau;
        let cycles = (phi(1.0) - phi(0.0)).abs();
        let panels = (64.0 * (cycles + 1.0)).ceil() as usize;
        let h = 1.0 / panels as f64;
        let mut acc = KahanSum::default();
        for k in 0..panels {
            let lo = h * k as f64;
            acc.add(gl20().integrate(lo, lo + h, |tau| {
                let (sn, _) = phase_sin_cos(0.5 * phi(tau));
                4.0 * sn * sn
            }));
        }
        let system = ExpSystem::new(
            vec![0, j],
            s,
            Domain::Curve { curve: curve.clone(), t_end: t_j, weight: Weight::Lebesgue },
        )?;
        let g = gram_matrix(&system, 1e-13 * t_j)?;
        let (sn, cs) = phase_sin_cos(-jf * p0);
        let c = [C64::new(1.0, 0.0), -C64::new(cs, sn)];
        rows.push(MinimalTimeRow {
            j,
            t_j,
            ratio: acc.value(),
            gram_ratio: g.quadratic_form(&c) / t_j,
            coefficient_norm_sq: c.iter().map(|z| z.norm_sqr()).sum(),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// High-frequency bounds on measures
// ---------------------------------------------------------------------------

pub const DEFAULT_WINDOW: i64 = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighFreqRow {
    pub n: i64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub nodes: usize,
    /// `lambda_min >= 1/2` and `lambda_max <= 3/2`.
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighFreqReport {
    pub s: f64,
    pub window: i64,
    pub delta_hat: f64,
    pub eta_hat: f64,
    /// `s delta_hat <= 1`: the hypothesis fails; the sweep still runs.
    pub decay_too_weak: bool,
    pub rows: Vec<HighFreqRow>,
    pub n_empirical: Option<i64>,
}

/// Indices `N <= |n| <= N + W`.
pub fn window_indices(n: i64, window: i64) -> Vec<i64> {
    let mut v: Vec<i64> = (-(n + window)..=-n).collect();
    v.extend(n.max(1)..=n + window);
    if n == 0 {
        v.dedup();
    }
    v
}

fn max_difference(indices: &[i64], s: f64) -> f64 {
    let top = indices.iter().map(|n| n.abs()).max().unwrap_or(0);
    let bottom = indices.iter().map(|n| n.abs()).min().unwrap_or(0);
    (temporal_freq(top, s) - temporal_freq(bottom, s)).hypot(2.0 * top as f64)
}

/// Gram spectra on `mu` for the windows `N <= |n| <= N + W` along `n_grid`,
/// the measure discretised afresh for each window's largest frequency.
pub fn highfreq_bounds(
    kind: &MeasureKind,
    s: f64,
    n_grid: &[i64],
    window: i64,
    stop_at_first: bool,
) -> Result<HighFreqReport> {
    let probe = MeasureSpec::new(kind.clone(), MeasureSpec::resolution_for(kind, 1000.0))?;
    let decay = fit_fourier_decay(&probe, &logspace(10.0, 1000.0, 8))?;
    let mut rows = Vec::new();
    let mut n_empirical = None;
    for &n in n_grid {
        let indices = window_indices(n, window);
        let measure = MeasureSpec::new(kind.clone(), MeasureSpec::resolution_for(kind, max_difference(&indices, s)))?;
        let sys = ExpSystem::new(indices, s, Domain::Measure(measure.clone()))?;
        let g = gram_matrix(&sys, 0.0)?;
        let eig = hermitian_eigen(&g.entries);
        let lmin = eig.values[0];
        let lmax = *eig.values.last().unwrap();
        let within = lmin >= 0.5 && lmax <= 1.5;
        rows.push(HighFreqRow { n, lambda_min: lmin, lambda_max: lmax, nodes: measure.len(), within });
        if within && n_empirical.is_none() {
            n_empirical = Some(n);
            if stop_at_first {
                break;
            }
        }
    }
    Ok(HighFreqReport {
        s,
        window,
        delta_hat: decay.delta_hat,
        eta_hat: decay.eta_hat,
        decay_too_weak: s * decay.delta_hat <= 1.0,
        rows,
        n_empirical,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SSweepRow {
    pub s: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Fixed lowest index `N`, growing dispersion exponent.
pub fn highfreq_s_sweep(kind: &MeasureKind, n: i64, s_grid: &[f64], window: i64) -> Result<Vec<SSweepRow>> {
    let indices = window_indices(n, window);
    let mut rows = Vec::new();
    for &s in s_grid {
        let measure = MeasureSpec::new(kind.clone(), MeasureSpec::resolution_for(kind, max_difference(&indices, s)))?;
        let g = gram_matrix(&ExpSystem::new(indices.clone(), s, Domain::Measure(measure))?, 0.0)?;
        let eig = hermitian_eigen(&g.entries);
        rows.push(SSweepRow { s, lambda_min: eig.values[0], lambda_max: *eig.values.last().unwrap() });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Sharpness of the decay hypothesis
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub n_grid: Vec<i64>,
    pub sums: Vec<f64>,
    pub fit: LineFit,
    pub expected_slope: f64,
    /// Largest `|mu_hat - nu_hat|` over the pairs `1 <= m < n <= 16`, with
    /// `mu_hat` from the discretised measure.
    pub transform_check: f64,
}

/// `S_N = sum_{1 <= n != m <= N} nu_hat(|n|^s - |m|^s)`.
pub fn sharpness_sum(delta: f64, s: f64, n_grid: &[i64]) -> Result<SharpnessReport> {
    if !(delta > 0.0 && delta < 1.0) || delta * s > 1.0 {
        return Err(invalid("sharpness needs 0 < delta < 1 and delta s <= 1"));
    }
    let top = *n_grid.iter().max().ok_or_else(|| invalid("empty N grid"))?;
    if n_grid.iter().any(|&n| n < 2) {
        return Err(invalid("N must be at least 2"));
    }
    let pw: Vec<f64> = (0..=top).map(|k| temporal_freq(k, s)).collect();
    let mut running = vec![0.0; top as usize + 1];
    let mut acc = KahanSum::default();
    for n in 2..=top as usize {
        for m in 1..n {
            acc.add(2.0 * nu_hat(delta, pw[n] - pw[m]));
        }
        running[n] = acc.value();
    }
    let sums: Vec<f64> = n_grid.iter().map(|&n| running[n as usize]).collect();
    let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let fit = loglog(&xs, &sums).ok_or_else(|| invalid("degenerate sharpness data"))?;
    let kind = MeasureKind::ProductNuDelta { delta };
    let measure = MeasureSpec::new(kind.clone(), MeasureSpec::resolution_for(&kind, pw[16.min(top) as usize]))?;
    let mut transform_check: f64 = 0.0;
    for n in 2..=16.min(top) as usize {
        for m in 1..n {
            let xi = pw[n] - pw[m];
            transform_check = transform_check.max((mu_hat(&measure, [-xi, 0.0]) - nu_hat(delta, xi)).norm());
        }
    }
    Ok(SharpnessReport { n_grid: n_grid.to_vec(), sums, fit, expected_slope: 2.0 - delta * s, transform_check })
}

// ---------------------------------------------------------------------------
// Low and high frequencies together
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedRow {
    pub s: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `sup_{|m| <= 1} sum_{2 <= |n| <= N} |I_{m,n}|`.
    pub coupling: f64,
    /// `max_{|m| <= 1, |n| >= 2} |I_{m,n}| (|n|^s - 1)`.
    pub decay_product: f64,
}

pub fn merged_bound_experiment(
    curve: &CurveSpec,
    t_end: f64,
    n: i64,
    s_grid: &[f64],
    tol: f64,
) -> Result<Vec<MergedRow>> {
    if n < 2 {
        return Err(invalid("N must be at least 2"));
    }
    let mut rows = Vec::new();
    for &s in s_grid {
        let sys = ExpSystem::symmetric_on_curve(n, s, curve.clone(), t_end)?;
        let g = gram_matrix(&sys, tol)?;
        let eig = hermitian_eigen(&g.entries);
        let mut coupling: f64 = 0.0;
        let mut product: f64 = 0.0;
        for (i, &m) in sys.indices.iter().enumerate() {
            if m.abs() > 1 {
                continue;
            }
            let mut row = 0.0;
            for (j, &k) in sys.indices.iter().enumerate() {
                if k.abs() >= 2 {
                    let v = g.entries[(i, j)].norm();
                    row += v;
                    product = product.max(v * (temporal_freq(k, s) - 1.0));
                }
            }
            coupling = coupling.max(row);
        }
        rows.push(MergedRow {
            s,
            lambda_min: eig.values[0],
            lambda_max: *eig.values.last().unwrap(),
            coupling,
            decay_product: product,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parabola() -> CurveSpec {
        CurveSpec::monomial(2.0).unwrap()
    }

    #[test]
    fn single_index_gives_t() {
        let sys =
            ExpSystem::new(vec![0], 2.0, Domain::Curve { curve: parabola(), t_end: 2.0, weight: Weight::Lebesgue })
                .unwrap();
        let g = gram_matrix(&sys, 1e-12).unwrap();
        assert_eq!(g.entries[(0, 0)], C64::new(2.0, 0.0));
        let r = riesz_bounds(&g, DEFAULT_SEED).unwrap();
        assert_eq!((r.lambda_min, r.lambda_max), (2.0, 2.0));
    }

    #[test]
    fn three_by_three_on_parabola() {
        let sys = ExpSystem::new(
            vec![-1, 0, 1],
            1.0,
            Domain::Curve { curve: parabola(), t_end: 1.0, weight: Weight::Lebesgue },
        )
        .unwrap();
        let g = gram_matrix(&sys, 1e-12).unwrap();
        assert!(g.entries.hermitian_defect() < 1e-15);
        let r = riesz_bounds(&g, DEFAULT_SEED).unwrap();
        assert!(r.lambda_min > 0.0 && r.lambda_min < 1.0, "{}", r.lambda_min);
        assert!(r.charpoly_deviation.unwrap() < 1e-10);
        assert!(r.sandwich_ok());
    }

    #[test]
    fn translation_invariance() {
        // moving the curve by x0 conjugates G by diag(exp(2 pi i n x0))
        let a = gram_matrix(&ExpSystem::symmetric_on_curve(2, 2.0, parabola(), 1.0).unwrap(), 1e-12).unwrap();
        let x0 = 0.3137;
        let d: Vec<C64> =
            a.indices.iter().map(|&n| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * n as f64 * x0)).collect();
        let mut b = a.clone();
        b.entries = CMatrix::from_fn(5, 5, |i, j| d[i].conj() * a.entries[(i, j)] * d[j]);
        let ra = riesz_bounds(&a, 1).unwrap();
        let rb = riesz_bounds(&b, 1).unwrap();
        assert!((ra.lambda_min - rb.lambda_min).abs() < 1e-10);
        assert!((ra.lambda_max - rb.lambda_max).abs() < 1e-10);
    }

    #[test]
    fn measure_diagonal_is_one() {
        let m = MeasureSpec::new(
            MeasureKind::CircleArc { radius: 1.0, start: 0.0, sweep: std::f64::consts::FRAC_PI_2 },
            200,
        )
        .unwrap();
        let g = gram_matrix(&ExpSystem::new(vec![-2, 1, 3], 2.0, Domain::Measure(m)).unwrap(), 0.0).unwrap();
        for i in 0..3 {
            assert!((g.entries[(i, i)].re - 1.0).abs() < 1e-14);
        }
        assert!(g.entries.hermitian_defect() == 0.0);
    }

    #[test]
    fn node_sum_matches_transform() {
        let m = MeasureSpec::new(MeasureKind::ArcLengthOnCircle { radius: 0.7 }, 256).unwrap();
        let sys = ExpSystem::new(vec![-3, -1, 2, 4], 1.5, Domain::Measure(m.clone())).unwrap();
        let g = gram_matrix(&sys, 0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let xi = [sys.temporal_freq(i) - sys.temporal_freq(j), sys.spatial_freq(i) - sys.spatial_freq(j)];
                assert!((g.entries[(i, j)] - mu_hat(&m, xi)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gram_file_round_trip() {
        let g = gram_matrix(&ExpSystem::symmetric_on_curve(1, 2.0, parabola(), 1.0).unwrap(), 1e-12).unwrap();
        let text = serde_json::to_string(&g.to_file()).unwrap();
        let back = GramMatrix::from_file(&serde_json::from_str(&text).unwrap(), 1e-12).unwrap();
        assert_eq!(back.entries, g.entries);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut g = gram_matrix(&ExpSystem::symmetric_on_curve(1, 2.0, parabola(), 1.0).unwrap(), 1e-12).unwrap();
        g.entries[(0, 1)] += C64::new(1e-6, 0.0);
        assert!(matches!(riesz_bounds(&g, 0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn minimal_time_ratios_fall() {
        let rows = minimal_time_counterexample(&parabola(), 2.0, 2.0, &[2, 10]).unwrap();
        assert!((rows[0].t_j - 2f64.powf(-2.75)).abs() < 1e-15);
        assert!(rows[1].ratio < rows[0].ratio);
        for r in &rows {
            assert_eq!(r.coefficient_norm_sq, 2.0);
            assert!((r.ratio - r.gram_ratio).abs() < 1e-9, "{} {}", r.ratio, r.gram_ratio);
        }
    }

    #[test]
    fn window_indices_are_sorted() {
        assert_eq!(window_indices(2, 2), vec![-4, -3, -2, 2, 3, 4]);
        assert_eq!(window_indices(0, 1), vec![-1, 0, 1]);
    }
}
