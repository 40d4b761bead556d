//! Fractional Schrödinger flow on the torus,
//! `d/dt u = 2 pi i (|D|^s u - V u)` with `|D|^s e^{2 pi i n x} = |n|^s e^{2 pi i n x}`,
//! so that the free solution is `sum c_n e^{2 pi i (n x + |n|^s t)}`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::classify::temporal_freq;
use crate::curves::{phase_sin_cos, CurveSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::C64;
use crate::quadrature::composite_gl10;
use crate::riesz::{gram_matrix, random_unit_vector, riesz_bounds, ExpSystem};

fn cis(cycles: f64) -> C64 {
    let (s, c) = phase_sin_cos(cycles);
    C64::new(c, s)
}

/// Fourier coefficients `c_{-K}, ..., c_K` at time `time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusState {
    pub coeffs: Vec<C64>,
    pub time: f64,
    pub s: f64,
    pub k: usize,
}

impl TorusState {
    pub fn new(coeffs: Vec<C64>, s: f64) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(invalid("coefficients must be indexed -K..K"));
        }
        let k = coeffs.len() / 2;
        Ok(Self { coeffs, time: 0.0, s, k })
    }

    /// Embeds `c_n` for `|n| <= modes.len() / 2` into `-K..K`.
    pub fn from_modes(modes: &[(i64, C64)], k: usize, s: f64) -> Result<Self> {
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * k + 1];
        for &(n, c) in modes {
            if n.unsigned_abs() as usize > k {
                return Err(invalid(format!("mode {n} outside -{k}..{k}")));
            }
            coeffs[(n + k as i64) as usize] += c;
        }
        Ok(Self { coeffs, time: 0.0, s, k })
    }

    pub fn coeff(&self, n: i64) -> C64 {
        if n.unsigned_abs() as usize > self.k {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.k as i64) as usize]
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest `|n|` with a nonzero coefficient.
    pub fn active_mode(&self) -> usize {
        (0..=self.k)
            .rev()
            .find(|&n| self.coeff(n as i64).norm() > 0.0 || self.coeff(-(n as i64)).norm() > 0.0)
            .unwrap_or(0)
    }

    /// `u(x) = sum_n c_n e^{2 pi i n x}`.
    pub fn eval(&self, x: f64) -> C64 {
        let x = x - x.floor();
        let k = self.k as i64;
        (-k..=k).zip(&self.coeffs).map(|(n, c)| c * cis(n as f64 * x)).sum()
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        let k = self.k.max(other.k) as i64;
        (-k..=k).map(|n| (self.coeff(n) - other.coeff(n)).norm()).fold(0.0, f64::max)
    }

    pub fn l2_distance(&self, other: &Self) -> f64 {
        let k = self.k.max(other.k) as i64;
        (-k..=k).map(|n| (self.coeff(n) - other.coeff(n)).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Exact free evolution by `dt`.
    pub fn free_flow(&self, dt: f64) -> Self {
        let k = self.k as i64;
        let coeffs = (-k..=k).zip(&self.coeffs).map(|(n, c)| c * cis(temporal_freq(n, self.s) * dt)).collect();
        Self { coeffs, time: self.time + dt, s: self.s, k: self.k }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero,
    Constant {
        value: f64,
    },
    /// `amplitude cos(2 pi mode x)`.
    Cosine {
        amplitude: f64,
        mode: u32,
    },
    /// Values on the equispaced grid `x_j = j / len`, interpolated linearly.
    Tabulated {
        values: Vec<f64>,
    },
}

impl PotentialSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => *value,
            Self::Cosine { amplitude, mode } => amplitude * (2.0 * PI * *mode as f64 * x).cos(),
            Self::Tabulated { values } => {
                let n = values.len();
                let y = (x - x.floor()) * n as f64;
                let j = (y.floor() as usize).min(n - 1);
                let f = y - j as f64;
                values[j] * (1.0 - f) + values[(j + 1) % n] * f
            }
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => value.abs(),
            Self::Cosine { amplitude, .. } => amplitude.abs(),
            Self::Tabulated { values } => values.iter().map(|v| v.abs()).fold(0.0, f64::max),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Tabulated { values } if values.is_empty() => Err(invalid("empty potential table")),
            _ if !self.sup_norm().is_finite() => Err(invalid("potential must be finite")),
            _ => Ok(()),
        }
    }

    fn is_zero(&self) -> bool {
        self.sup_norm() == 0.0
    }
}

/// Recommended time step `0.01 / (1 + ||V||)`.
pub fn recommended_dt(v: &PotentialSpec) -> f64 {
    0.01 / (1.0 + v.sup_norm())
}

/// Fraction of the energy tolerated in the top tenth of the working modes.
pub const ALIAS_TOL: f64 = 1e-8;

/// Strang splitting in a working space of modes `-2K..2K` sampled on
/// `4K + 1` points.
struct Stepper {
    k: usize,
    s: f64,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `e^{-2 pi i V(x_j) dt}`.
    potential_phase: Vec<C64>,
    dt: f64,
    /// FFT-ordered coefficients.
    work: Vec<C64>,
    scratch: Vec<C64>,
    norm0: f64,
    pub max_tail: f64,
    pub max_norm_drift: f64,
    active: bool,
}

impl Stepper {
    fn new(u0: &TorusState, v: &PotentialSpec, dt: f64) -> Self {
        let k = u0.k;
        let m = 4 * k + 1;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let mut work = vec![C64::new(0.0, 0.0); m];
        for n in -(k as i64)..=k as i64 {
            work[n.rem_euclid(m as i64) as usize] = u0.coeff(n);
        }
        let mut s = Self {
            k,
            s: u0.s,
            m,
            fwd,
            inv,
            potential_phase: Vec::new(),
            dt,
            work,
            scratch: Vec::new(),
            norm0: u0.norm_sq(),
            max_tail: 0.0,
            max_norm_drift: 0.0,
            active: !v.is_zero(),
        };
        s.set_dt(v, dt);
        s
    }

    fn set_dt(&mut self, v: &PotentialSpec, dt: f64) {
        self.dt = dt;
        self.potential_phase = (0..self.m).map(|j| cis(-v.eval(j as f64 / self.m as f64) * dt)).collect();
    }

    fn mode(&self, j: usize) -> i64 {
        if j <= 2 * self.k {
            j as i64
        } else {
            j as i64 - self.m as i64
        }
    }

    fn free(&mut self, tau: f64) {
        for j in 0..self.m {
            let n = self.mode(j);
            self.work[j] *= cis(temporal_freq(n, self.s) * tau);
        }
    }

    fn potential(&mut self) {
        if !self.active {
            return;
        }
        self.scratch
            .resize(self.inv.get_inplace_scratch_len().max(self.fwd.get_inplace_scratch_len()), C64::new(0.0, 0.0));
        self.inv.process_with_scratch(&mut self.work, &mut self.scratch);
        for (u, p) in self.work.iter_mut().zip(&self.potential_phase) {
            *u *= p;
        }
        self.fwd.process_with_scratch(&mut self.work, &mut self.scratch);
        let scale = 1.0 / self.m as f64;
        for u in &mut self.work {
            *u *= scale;
        }
    }

    /// One Strang step of length `dt`.
    fn step(&mut self) -> Result<()> {
        self.free(0.5 * self.dt);
        self.potential();
        self.free(0.5 * self.dt);
        self.monitor()
    }

    fn monitor(&mut self) -> Result<()> {
        let total: f64 = self.work.iter().map(|c| c.norm_sqr()).sum();
        let cut = (0.9 * self.k as f64).floor() as i64;
        let tail: f64 = (0..self.m).filter(|&j| self.mode(j).abs() > cut).map(|j| self.work[j].norm_sqr()).sum();
        let frac = if total > 0.0 { tail / total } else { 0.0 };
        self.max_tail = self.max_tail.max(frac);
        if self.norm0 > 0.0 {
            self.max_norm_drift = self.max_norm_drift.max((total - self.norm0).abs() / self.norm0);
        }
        if frac > ALIAS_TOL {
            return Err(Error::ResolutionExceeded { tail_fraction: frac });
        }
        Ok(())
    }

    fn state(&self, time: f64) -> TorusState {
        let k = self.k as i64;
        let coeffs = (-k..=k).map(|n| self.work[n.rem_euclid(self.m as i64) as usize]).collect();
        TorusState { coeffs, time, s: self.s, k: self.k }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub state: TorusState,
    pub steps: usize,
    /// Largest relative change of `sum |c_n|^2` over the working space.
    pub max_norm_drift: f64,
    /// Largest energy fraction seen in the top tenth of the modes.
    pub max_tail_fraction: f64,
}

/// Strang splitting to `t_final` with steps of at most `dt`.
///
/// The step bound `0.01 / (1 + ||V||)` of [`recommended_dt`] is advice only.
pub fn evolve(u0: &TorusState, v: &PotentialSpec, t_final: f64, dt: f64) -> Result<EvolveReport> {
    v.validate()?;
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(invalid("dt must be positive and t_final non-negative"));
    }
    if u0.k < 2 * u0.active_mode() {
        return Err(invalid(format!("K = {} is below twice the active mode {}", u0.k, u0.active_mode())));
    }
    let steps = ((t_final / dt) * (1.0 - 1e-12)).ceil().max(0.0) as usize;
    let mut stepper = Stepper::new(u0, v, if steps > 0 { t_final / steps as f64 } else { dt });
    stepper.monitor()?;
    for _ in 0..steps {
        stepper.step()?;
    }
    Ok(EvolveReport {
        state: stepper.state(u0.time + t_final),
        steps,
        max_norm_drift: stepper.max_norm_drift,
        max_tail_fraction: stepper.max_tail,
    })
}

/// Duhamel fixed-point iteration in the interaction picture,
/// `w(t) = w0 - 2 pi i int_0^t S(-tau) V S(tau) w(tau) dtau`, on a uniform
/// grid of `nodes` intervals with the cumulative trapezoid rule.
pub fn duhamel_picard(
    u0: &TorusState,
    v: &PotentialSpec,
    t_final: f64,
    iterations: usize,
    nodes: usize,
) -> Result<TorusState> {
    v.validate()?;
    if nodes < 2 {
        return Err(invalid("need at least two nodes"));
    }
    let k = u0.k;
    let m = 4 * k + 1;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mode = |j: usize| if j <= 2 * k { j as i64 } else { j as i64 - m as i64 };
    let freqs: Vec<f64> = (0..m).map(|j| temporal_freq(mode(j), u0.s)).collect();
    let vgrid: Vec<f64> = (0..m).map(|j| v.eval(j as f64 / m as f64)).collect();
    let mut w0 = vec![C64::new(0.0, 0.0); m];
    for n in -(k as i64)..=k as i64 {
        w0[n.rem_euclid(m as i64) as usize] = u0.coeff(n);
    }
    let h = t_final / nodes as f64;
    let times: Vec<f64> = (0..=nodes).map(|i| h * i as f64).collect();
    // interaction-picture iterate at every node
    let mut w: Vec<Vec<C64>> = vec![w0.clone(); nodes + 1];
    for _ in 0..iterations {
        let g: Vec<Vec<C64>> = times
            .iter()
            .zip(&w)
            .map(|(&t, wi)| {
                // S(-t) V S(t) w
                let mut u: Vec<C64> = wi.iter().zip(&freqs).map(|(c, f)| c * cis(f * t)).collect();
                inv.process(&mut u);
                for (x, vv) in u.iter_mut().zip(&vgrid) {
                    *x *= vv / m as f64;
                }
                fwd.process(&mut u);
                u.iter().zip(&freqs).map(|(c, f)| c * cis(-f * t)).collect()
            })
            .collect();
        let mut next = vec![w0.clone()];
        let mut integral = vec![C64::new(0.0, 0.0); m];
        for i in 1..=nodes {
            for j in 0..m {
                integral[j] += 0.5 * h * (g[i - 1][j] + g[i][j]);
            }
            next.push(w0.iter().zip(&integral).map(|(a, b)| a - C64::new(0.0, 2.0 * PI) * b).collect());
        }
        w = next;
    }
    let last = &w[nodes];
    let coeffs = (-(k as i64)..=k as i64)
        .map(|n| {
            let j = n.rem_euclid(m as i64) as usize;
            last[j] * cis(freqs[j] * t_final)
        })
        .collect();
    Ok(TorusState { coeffs, time: u0.time + t_final, s: u0.s, k })
}

// ---------------------------------------------------------------------------
// Traces along curves
// ---------------------------------------------------------------------------

/// Anything that can produce `u(t, x)` along increasing times.
pub trait SolutionEvaluator {
    /// `u(times[i], xs[i])`; `times` must be non-decreasing.
    fn sample_along(&self, times: &[f64], xs: &[f64]) -> Result<Vec<C64>>;
}

/// `sum c_n e^{2 pi i (n x + |n|^s t)}` in closed form.
pub struct FreeSolution {
    pub u0: TorusState,
}

impl SolutionEvaluator for FreeSolution {
    fn sample_along(&self, times: &[f64], xs: &[f64]) -> Result<Vec<C64>> {
        let k = self.u0.k as i64;
        let freqs: Vec<f64> = (-k..=k).map(|n| temporal_freq(n, self.u0.s)).collect();
        Ok(times
            .iter()
            .zip(xs)
            .map(|(&t, &x)| {
                let x = x - x.floor();
                (-k..=k)
                    .zip(&self.u0.coeffs)
                    .zip(&freqs)
                    .map(|((n, c), f)| {
                        let a = n as f64 * x;
                        let b = f * t;
                        c * cis((a - a.round()) + (b - b.round()))
                    })
                    .sum()
            })
            .collect())
    }
}

/// Split-step solution, stepping forward to each requested time.
pub struct SplitStepSolution {
    pub u0: TorusState,
    pub potential: PotentialSpec,
    pub dt: f64,
}

impl SolutionEvaluator for SplitStepSolution {
    fn sample_along(&self, times: &[f64], xs: &[f64]) -> Result<Vec<C64>> {
        let mut stepper = Stepper::new(&self.u0, &self.potential, self.dt);
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for (&t, &x) in times.iter().zip(xs) {
            if t < now - 1e-15 {
                return Err(invalid("sample times must be non-decreasing"));
            }
            let gap = t - now;
            let full = (gap / self.dt * (1.0 - 1e-12)).floor() as usize;
            for _ in 0..full {
                stepper.step()?;
            }
            let rest = gap - full as f64 * self.dt;
            if rest > 1e-15 {
                stepper.set_dt(&self.potential, rest);
                stepper.step()?;
                stepper.set_dt(&self.potential, self.dt);
            }
            now = t;
            out.push(stepper.state(t).eval(x));
        }
        Ok(out)
    }
}

/// `int_a^b |u(t, p(t))|^2 dt` by composite 10-point Gauss–Legendre on
/// `panels` panels; `p(t)` is reduced modulo 1.
pub fn trace_along_curve(u: &dyn SolutionEvaluator, curve: &CurveSpec, a: f64, b: f64, panels: usize) -> Result<f64> {
    trace_along_shifted(u, curve, 0.0, a, b, panels)
}

/// The trace along the translated curve `q(t) = p(t + shift)`.
pub fn trace_along_shifted(
    u: &dyn SolutionEvaluator,
    curve: &CurveSpec,
    shift: f64,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<f64> {
    if !(b > a) || panels == 0 {
        return Err(invalid("need a < b and at least one panel"));
    }
    let rule = composite_gl10(a, b, panels);
    let times: Vec<f64> = rule.iter().map(|r| r.0).collect();
    let xs: Vec<f64> = times
        .iter()
        .map(|&t| {
            let x = curve.p(t + shift);
            x - x.floor()
        })
        .collect();
    let vals = u.sample_along(&times, &xs)?;
    Ok(vals.iter().zip(&rule).map(|(v, (_, w))| w * v.norm_sqr()).sum())
}

/// Free traces `int_a^b |u_k(t, p(t))|^2 dt` of several initial states at
/// once, sharing the exponentials at every node.
pub fn free_traces(states: &[TorusState], curve: &CurveSpec, a: f64, b: f64, panels: usize) -> Result<Vec<f64>> {
    if !(b > a) || panels == 0 {
        return Err(invalid("need a < b and at least one panel"));
    }
    let Some(first) = states.first() else { return Ok(Vec::new()) };
    if states.iter().any(|u| u.k != first.k || u.s != first.s) {
        return Err(invalid("states must share K and s"));
    }
    let top = states.iter().map(|u| u.active_mode()).max().unwrap_or(0) as i64;
    let freqs: Vec<f64> = (-top..=top).map(|n| temporal_freq(n, first.s)).collect();
    let coeffs: Vec<Vec<C64>> = states.iter().map(|u| (-top..=top).map(|n| u.coeff(n)).collect()).collect();
    let mut traces = vec![0.0; states.len()];
    let mut e = vec![C64::new(0.0, 0.0); freqs.len()];
    for (t, w) in composite_gl10(a, b, panels) {
        let x = curve.p(t);
        let x = x - x.floor();
        for ((ek, n), f) in e.iter_mut().zip(-top..=top).zip(&freqs) {
            let a = n as f64 * x;
            let b = f * t;
            *ek = cis((a - a.round()) + (b - b.round()));
        }
        for (tr, c) in traces.iter_mut().zip(&coeffs) {
            let u: C64 = c.iter().zip(&e).map(|(c, e)| c * e).sum();
            *tr += w * u.norm_sqr();
        }
    }
    Ok(traces)
}

/// Panels resolving every frequency of modes `|n| <= k` along `p` on `[0, T]`:
/// one 10-point panel per cycle of `|u|^2`.
pub fn panels_for(curve: &CurveSpec, s: f64, k: usize, t_end: f64) -> usize {
    let slope = (0..=64).map(|i| curve.dp(t_end * i as f64 / 64.0).abs()).fold(0.0, f64::max);
    // |u|^2 carries differences of frequencies: up to twice the largest
    let cycles = 2.0 * (k as f64 * slope + temporal_freq(k as i64, s)) * t_end;
    cycles.ceil() as usize + 16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceTrial {
    pub name: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceBoundReport {
    pub trials: Vec<TraceTrial>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// `lambda_min` of the free Gram matrix of `-K..K` on `[0, T]`.
    pub gram_lambda_min: f64,
}

/// Trace-to-norm ratios over single modes, short-time counterexample
/// vectors, the free Gram minimiser and `random` random vectors.
#[allow(clippy::too_many_arguments)]
pub fn trace_bound_experiment(
    curve: &CurveSpec,
    s: f64,
    v: &PotentialSpec,
    t_end: f64,
    k: usize,
    random: usize,
    seed: u64,
    dt: f64,
) -> Result<TraceBoundReport> {
    let half = k / 2;
    let mut trials: Vec<(String, Vec<(i64, C64)>)> = Vec::new();
    let one = C64::new(1.0, 0.0);
    for n in 0..=half as i64 {
        trials.push((format!("mode {n}"), vec![(n, one)]));
        if n > 0 {
            trials.push((format!("mode -{n}"), vec![(-n, one)]));
        }
    }
    for j in [1, 2, half as i64].into_iter().filter(|&j| j >= 1 && j <= half as i64) {
        trials.push((format!("pair 0,{j}"), vec![(0, one), (j, -cis(-(j as f64) * curve.p(0.0)))]));
    }
    let sys = ExpSystem::symmetric_on_curve(half as i64, s, curve.clone(), t_end)?;
    let g = gram_matrix(&sys, 1e-11)?;
    let rep = riesz_bounds(&g, seed)?;
    trials.push(("gram minimiser".into(), sys.indices.iter().zip(&rep.min_vector).map(|(&n, &c)| (n, c)).collect()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 0..random {
        let c = random_unit_vector(&mut rng, 2 * half + 1);
        trials.push((format!("random {r}"), (-(half as i64)..=half as i64).zip(c).collect()));
    }
    let states = trials.iter().map(|(_, modes)| TorusState::from_modes(modes, k, s)).collect::<Result<Vec<_>>>()?;
    let traces = if v.is_zero() {
        free_traces(&states, curve, 0.0, t_end, panels_for(curve, s, half, t_end))?
    } else {
        let panels = panels_for(curve, s, k, t_end);
        states
            .iter()
            .map(|u0| {
                let sol = SplitStepSolution { u0: u0.clone(), potential: v.clone(), dt };
                trace_along_curve(&sol, curve, 0.0, t_end, panels)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let out: Vec<TraceTrial> = trials
        .into_iter()
        .zip(states.iter().zip(traces))
        .map(|((name, _), (u0, tr))| TraceTrial { name, ratio: tr / u0.norm_sq() })
        .collect();
    let max_ratio = out.iter().map(|t| t.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = out.iter().map(|t| t.ratio).fold(f64::INFINITY, f64::min);
    Ok(TraceBoundReport { trials: out, max_ratio, min_ratio, gram_lambda_min: rep.lambda_min })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub dts: Vec<f64>,
    /// `||u_dt - u_ref||_2` with the reference at a quarter of the finest step.
    pub errors: Vec<f64>,
    /// `log2` of successive error ratios.
    pub orders: Vec<f64>,
    pub max_norm_drift: f64,
}

pub fn convergence_study(u0: &TorusState, v: &PotentialSpec, t_final: f64, dts: &[f64]) -> Result<ConvergenceStudy> {
    let finest = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let reference = evolve(u0, v, t_final, finest / 4.0)?;
    let mut errors = Vec::new();
    let mut drift = reference.max_norm_drift;
    for &dt in dts {
        let r = evolve(u0, v, t_final, dt)?;
        drift = drift.max(r.max_norm_drift);
        errors.push(r.state.l2_distance(&reference.state));
    }
    let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(ConvergenceStudy { dts: dts.to_vec(), errors, orders, max_norm_drift: drift })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_modes(k: usize, s: f64) -> TorusState {
        let modes: Vec<(i64, C64)> =
            (-2..=2).map(|n| (n, C64::new(1.0 / (1.0 + n as f64 * n as f64), 0.3 * n as f64))).collect();
        TorusState::from_modes(&modes, k, s).unwrap()
    }

    #[test]
    fn zero_potential_is_free_flow() {
        let u0 = five_modes(8, 2.0);
        let r = evolve(&u0, &PotentialSpec::Zero, 1.3, 0.01).unwrap();
        assert!(r.state.max_distance(&u0.free_flow(1.3)) < 1e-12);
    }

    #[test]
    fn constant_potential_is_a_phase() {
        let u0 = five_modes(8, 1.5);
        let r = evolve(&u0, &PotentialSpec::Constant { value: 0.7 }, 1.0, 0.01).unwrap();
        let mut want = u0.free_flow(1.0);
        for c in &mut want.coeffs {
            *c *= cis(-0.7);
        }
        assert!(r.state.max_distance(&want) < 1e-12);
        assert!((r.state.norm_sq() - u0.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn splitting_is_second_order_and_unitary() {
        let u0 = five_modes(32, 2.0);
        let v = PotentialSpec::Cosine { amplitude: 0.1, mode: 1 };
        let c = convergence_study(&u0, &v, 1.0, &[1e-2, 5e-3, 2.5e-3]).unwrap();
        assert!(c.orders.iter().all(|&o| o >= 1.9), "{:?}", c.orders);
        assert!(c.max_norm_drift < 1e-10);
    }

    #[test]
    fn duhamel_agrees_for_small_potential() {
        let u0 = five_modes(8, 1.5);
        let v = PotentialSpec::Cosine { amplitude: 0.05, mode: 1 };
        let split = evolve(&u0, &v, 0.5, 1e-3).unwrap().state;
        let picard = duhamel_picard(&u0, &v, 0.5, 6, 8000).unwrap();
        assert!(split.max_distance(&picard) < 1e-5, "{}", split.max_distance(&picard));
    }

    #[test]
    fn aliasing_is_detected() {
        let u0 = TorusState::from_modes(&[(1, C64::new(1.0, 0.0))], 2, 2.0).unwrap();
        let v = PotentialSpec::Cosine { amplitude: 5.0, mode: 1 };
        assert!(matches!(evolve(&u0, &v, 1.0, 0.01), Err(Error::ResolutionExceeded { .. })));
    }

    #[test]
    fn constant_mode_trace() {
        let u0 = TorusState::from_modes(&[(0, C64::new(0.6, 0.8))], 4, 2.0).unwrap();
        let curve = CurveSpec::monomial(2.0).unwrap();
        let t = trace_along_curve(&FreeSolution { u0 }, &curve, 0.0, 1.7, 8).unwrap();
        assert!((t - 1.7).abs() < 1e-13);
    }

    #[test]
    fn split_step_sampling_matches_free_flow() {
        let u0 = five_modes(8, 2.0);
        let curve = CurveSpec::monomial(2.0).unwrap();
        let panels = panels_for(&curve, 2.0, 8, 1.0);
        let a = trace_along_curve(&FreeSolution { u0: u0.clone() }, &curve, 0.0, 1.0, panels).unwrap();
        let b = trace_along_curve(
            &SplitStepSolution { u0, potential: PotentialSpec::Zero, dt: 0.01 },
            &curve,
            0.0,
            1.0,
            panels,
        )
        .unwrap();
        assert!((a - b).abs() < 1e-11);
    }
}
