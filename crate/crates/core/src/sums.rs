//! Lattice sums over index pairs: the supremum controlling Ingham-type
//! bounds, witnesses for vanishing infima, and tails
//! `S_m(N) = sum_{|n| >= N, |n| != |m|} |n-m|^{-gamma} ||n|^s - |m|^s|^{-delta}`.

use serde::{Deserialize, Serialize};

use crate::classify::temporal_freq;
use crate::error::{invalid, Error, Result};
use crate::fit::{loglog, logspace, LineFit};
use crate::quadrature::{gl20, KahanSum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupScan {
    pub sup_value: f64,
    pub argmax: (i64, i64),
    /// `sup` over `max(|n|, |m|) <= K` at log-spaced `K`.
    pub running: Vec<(i64, f64)>,
    /// Fit of `log sup_K` against `log K` over the upper decade.
    pub growth_fit: Option<LineFit>,
}

/// `sup |n-m| / ||n|^s - |m|^s|^gamma` over `|n|, |m| <= N`, `|n| != |m|`.
///
/// The summand is invariant under `(n, m) -> (-n, -m)` and under swapping,
/// so only the pairs `(K, j)` and `(K, -j)` with `0 <= j < K` are visited,
/// shell by shell in `K = max(|n|, |m|)`.
pub fn sup_m(gamma: f64, s: f64, n_trunc: i64) -> Result<SupScan> {
    if n_trunc < 1 {
        return Err(invalid("truncation must be at least 1"));
    }
    let pw: Vec<f64> = (0..=n_trunc).map(|k| temporal_freq(k, s)).collect();
    let f = |num: f64, den: f64| if gamma == 1.0 { num / den } else { num / den.powf(gamma) };
    let mut best = f64::NEG_INFINITY;
    let mut argmax = (0, 0);
    let mut shell_best = vec![f64::NEG_INFINITY; n_trunc as usize + 1];
    for k in 1..=n_trunc {
        let pk = pw[k as usize];
        let mut sb = f64::NEG_INFINITY;
        let mut sarg = (0, 0);
        for j in 0..k {
            let den = pk - pw[j as usize];
            let same = f((k - j) as f64, den);
            let opposite = f((k + j) as f64, den);
            if same > sb {
                sb = same;
                sarg = (k, j);
            }
            if opposite > sb {
                sb = opposite;
                sarg = (k, -j);
            }
        }
        shell_best[k as usize] = sb;
        if sb > best {
            best = sb;
            argmax = sarg;
        }
    }
    let mut running = Vec::new();
    let mut acc = f64::NEG_INFINITY;
    let marks: Vec<i64> = logspace(1.0, n_trunc as f64, 41).into_iter().map(|x| x.round() as i64).collect();
    let mut mi = 0;
    for k in 1..=n_trunc {
        acc = acc.max(shell_best[k as usize]);
        while mi < marks.len() && marks[mi] == k {
            if running.last().map(|r: &(i64, f64)| r.0) != Some(k) {
                running.push((k, acc));
            }
            mi += 1;
        }
    }
    let upper: Vec<&(i64, f64)> = running.iter().filter(|(k, _)| *k * 10 >= n_trunc).collect();
    let xs: Vec<f64> = upper.iter().map(|r| r.0 as f64).collect();
    let ys: Vec<f64> = upper.iter().map(|r| r.1).collect();
    Ok(SupScan { sup_value: best, argmax, running, growth_fit: loglog(&xs, &ys) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfWitness {
    /// `"n = m + 1"` for `gamma < 1`, `"n = 2m"` otherwise.
    pub path: String,
    pub ms: Vec<i64>,
    pub ratios: Vec<f64>,
    /// Final ratio below a tenth of the first.
    pub tenfold_drop: bool,
}

/// Sequence along which `|n-m| / ||n|^s - |m|^s|^gamma` tends to zero.
pub fn inf_witness(gamma: f64, s: f64, n_trunc: i64) -> Result<InfWitness> {
    if n_trunc < 2 {
        return Err(invalid("truncation must be at least 2"));
    }
    let (path, ms, ratios): (&str, Vec<i64>, Vec<f64>) = if gamma < 1.0 {
        let ms: Vec<i64> = (1..n_trunc).collect();
        let r = ms.iter().map(|&m| 1.0 / (temporal_freq(m + 1, s) - temporal_freq(m, s)).powf(gamma)).collect();
        ("n = m + 1", ms, r)
    } else {
        let ms: Vec<i64> = (1..=n_trunc / 2).collect();
        let r = ms.iter().map(|&m| m as f64 / (temporal_freq(2 * m, s) - temporal_freq(m, s)).powf(gamma)).collect();
        ("n = 2m", ms, r)
    };
    let tenfold_drop = ratios.last().unwrap() < &(ratios[0] / 10.0);
    Ok(InfWitness { path: path.into(), ms, ratios, tenfold_drop })
}

/// Horizon used by [`tail_sum`] when none is given.
pub const DEFAULT_HORIZON: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSum {
    pub value: f64,
    /// Estimate of the error: the next Euler–Maclaurin term beyond the
    /// horizon plus a rounding allowance of `1e-14 value`.
    pub remainder_bound: f64,
    pub terms: usize,
    pub horizon: i64,
}

fn check_convergence(gamma: f64, delta: f64, s: f64) -> Result<()> {
    let lhs = s * delta + gamma;
    let need = if gamma >= 0.0 { 1.0 } else { delta.max(1.0) };
    if !(lhs > need) {
        return Err(Error::DivergentParameters(format!("s*delta + gamma = {lhs} must exceed {need}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::DivergentParameters(format!("delta = {delta} must be non-negative")));
    }
    Ok(())
}

/// `S_m(N)` summed exactly for `N <= |n| <= H` with the rest of each side
/// replaced by its Euler–Maclaurin expansion to the `f'` term.
pub fn tail_sum(gamma: f64, delta: f64, s: f64, m: i64, n_start: i64, horizon: Option<i64>) -> Result<TailSum> {
    check_convergence(gamma, delta, s)?;
    if n_start < 0 {
        return Err(invalid("tail start must be non-negative"));
    }
    let h = horizon.unwrap_or(DEFAULT_HORIZON);
    if h < 10 * n_start.max(m.abs()).max(1) {
        return Err(invalid(format!("horizon {h} is below 10 max(N, |m|)")));
    }
    let pm = temporal_freq(m, s);
    let term = |n: i64| {
        let d = (n - m).abs() as f64;
        let e = (temporal_freq(n, s) - pm).abs();
        (-gamma * d.ln() - delta * e.ln()).exp()
    };
    let mut acc = KahanSum::default();
    let mut terms = 0usize;
    for k in n_start..=h {
        if k == m.abs() {
            continue;
        }
        acc.add(term(k));
        terms += 1;
        if k != 0 {
            acc.add(term(-k));
            terms += 1;
        }
    }
    let mut value = acc.value();
    let mut bound = 0.0;
    for c in [m, -m] {
        let tail = SideTail { gamma, delta, s, c: c as f64, big_m: pm };
        let (est, err) = tail.beyond(h as f64);
        value += est;
        bound += err;
    }
    bound += 1e-14 * value.abs();
    Ok(TailSum { value, remainder_bound: bound, terms, horizon: h })
}

/// `f(x) = |x - c|^{-gamma} (x^s - M)^{-delta}` for `x` beyond the horizon.
struct SideTail {
    gamma: f64,
    delta: f64,
    s: f64,
    c: f64,
    big_m: f64,
}

impl SideTail {
    fn ln_f(&self, ln_x: f64, x: f64) -> f64 {
        // x^s - M = x^s (1 - M x^{-s})
        let ratio = self.big_m * (-self.s * ln_x).exp();
        let ln_gap = if self.gamma == 0.0 { 0.0 } else { (x - self.c).abs().ln() };
        -self.gamma * ln_gap - self.delta * (self.s * ln_x + (-ratio).ln_1p())
    }

    fn f(&self, x: f64) -> f64 {
        self.ln_f(x.ln(), x).exp()
    }

    fn df(&self, x: f64) -> f64 {
        let xs = x.powf(self.s);
        let dl = -self.gamma / (x - self.c) - self.delta * self.s * xs / x / (xs - self.big_m);
        self.f(x) * dl
    }

    /// `(sum_{x > H} f(x), error estimate)`.
    fn beyond(&self, h: f64) -> (f64, f64) {
        let p = self.gamma + self.s * self.delta;
        // int_H^inf f(x) dx with x = H e^y
        let y_max = 45.0 / (p - 1.0).max(1e-3);
        let panels = ((y_max / 0.5).ceil() as usize).clamp(16, 20_000);
        let width = y_max / panels as f64;
        let ln_h = h.ln();
        let mut integral = KahanSum::default();
        for k in 0..panels {
            let lo = width * k as f64;
            let v: f64 = gl20().integrate(lo, lo + width, |y| {
                let ln_x = ln_h + y;
                (self.ln_f(ln_x, ln_x.exp()) + ln_x).exp()
            });
            integral.add(v);
        }
        let end = ln_h + y_max;
        let cut = (self.ln_f(end, end.exp()) + end).exp() / (p - 1.0);
        let fh = self.f(h);
        let d1 = self.df(h);
        let est = integral.value() + cut - 0.5 * fh - d1 / 12.0;
        // next Euler–Maclaurin term f'''(H)/720, f''' by differences of f'
        let step = 1e-2 * h;
        let d3 = (self.df(h + step) - 2.0 * d1 + self.df(h - step)) / (step * step);
        (est, 10.0 * d3.abs() / 720.0 + cut)
    }
}

/// Expected decay exponent of `sup_m S_m(N)`; `eps` breaks the tie at
/// `gamma + delta = 1`.
pub fn sigma_expected(gamma: f64, delta: f64, s: f64, eps: f64) -> f64 {
    let g = gamma + delta;
    if (g - 1.0).abs() < 1e-12 {
        (s - 1.0) * delta - eps
    } else if g > 1.0 {
        (s - 1.0) * delta
    } else {
        s * delta + gamma - delta.max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDecayFit {
    pub n_grid: Vec<i64>,
    pub m_set: Vec<i64>,
    /// `max_m S_m(N)` along the grid.
    pub sup_values: Vec<f64>,
    pub slope: f64,
    pub fit: LineFit,
    pub sigma_expected: f64,
    /// `slope <= -sigma + 0.15`.
    pub within_tolerance: bool,
    /// Smallest grid `N` from which `sup_m S_m <= C N^{-sigma}` holds along
    /// the rest of the grid, with `C` the largest `N^sigma sup_m S_m` over
    /// the upper half of the grid.
    pub n0_empirical: i64,
}

pub const TAIL_SLOPE_TOLERANCE: f64 = 0.15;

pub fn tail_decay_fit(gamma: f64, delta: f64, s: f64, n_grid: &[i64], m_set: &[i64]) -> Result<TailDecayFit> {
    if n_grid.len() < 3 {
        return Err(invalid("tail decay fit needs at least three N values"));
    }
    let m_max = m_set.iter().map(|m| m.abs()).max().unwrap_or(0);
    let mut sups = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let horizon = DEFAULT_HORIZON.max(10 * n.max(m_max));
        let mut best: f64 = 0.0;
        for &m in m_set {
            best = best.max(tail_sum(gamma, delta, s, m, n, Some(horizon))?.value);
        }
        sups.push(best);
    }
    let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let fit = loglog(&xs, &sups).ok_or_else(|| invalid("degenerate tail data"))?;
    let sigma = sigma_expected(gamma, delta, s, 0.1);
    let half = n_grid.len() / 2;
    let c = xs[half..].iter().zip(&sups[half..]).map(|(n, v)| v * n.powf(sigma)).fold(0.0, f64::max);
    let mut n0 = *n_grid.last().unwrap();
    for i in (0..n_grid.len()).rev() {
        if sups[i] <= c * xs[i].powf(-sigma) * (1.0 + 1e-9) {
            n0 = n_grid[i];
        } else {
            break;
        }
    }
    Ok(TailDecayFit {
        n_grid: n_grid.to_vec(),
        m_set: m_set.to_vec(),
        sup_values: sups,
        slope: fit.slope,
        fit,
        sigma_expected: sigma,
        within_tolerance: fit.slope <= -sigma + TAIL_SLOPE_TOLERANCE,
        n0_empirical: n0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basel_tail() {
        // gamma = 0, delta = 1, s = 2, m = 0: 2 sum_{n >= 10} n^{-2}
        let t = tail_sum(0.0, 1.0, 2.0, 0, 10, Some(100_000)).unwrap();
        let head: f64 = (1..10).map(|n| 1.0 / (n * n) as f64).sum();
        let exact = 2.0 * (std::f64::consts::PI.powi(2) / 6.0 - head);
        assert!((t.value - exact).abs() < 1e-12, "{} vs {exact}", t.value);
        assert!(t.remainder_bound <= 1e-10 * t.value);
    }

    #[test]
    fn divergent_parameters_are_rejected() {
        assert!(matches!(tail_sum(0.0, 0.5, 2.0, 0, 1, None), Err(Error::DivergentParameters(_))));
        assert!(matches!(tail_sum(-0.5, 1.2, 1.2, 0, 1, None), Err(Error::DivergentParameters(_))));
    }

    #[test]
    fn sup_for_quadratic_frequencies_is_one() {
        let r = sup_m(1.0, 2.0, 2000).unwrap();
        assert!((r.sup_value - 1.0).abs() < 1e-12);
        assert_eq!((r.argmax.0 + r.argmax.1).abs(), 1);
    }

    #[test]
    fn inf_witnesses() {
        let w = inf_witness(0.5, 2.0, 1001).unwrap();
        assert_eq!(w.path, "n = m + 1");
        let at_1000 = w.ratios[999];
        assert!((at_1000 - 2001f64.powf(-0.5)).abs() < 1e-15 && at_1000 < 0.05);
        let w = inf_witness(2.0, 2.0, 2000).unwrap();
        assert!(w.tenfold_drop);
        assert!((w.ratios[9] - 10.0 / 300f64.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn sigma_cases() {
        assert_eq!(sigma_expected(0.0, 0.5, 2.5, 0.1), 0.25);
        assert_eq!(sigma_expected(0.25, 0.25, 5.0, 0.1), 0.5);
        assert!((sigma_expected(0.0, 1.0, 2.0, 0.1) - 0.9).abs() < 1e-15);
    }
}
