//! Oscillatory integrals `int_0^T exp(2 pi i ((n-m) p(t) + (|n|^s - |m|^s) t)) dt`
//! and the van der Corput bounds that control them.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_pair, tau_threshold, temporal_freq, PairTag};
use crate::curves::{phase_sin_cos, CurveSpec};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::{gl10, gl20};

/// Maximum number of accepted panels before giving up.
pub const PANEL_BUDGET: usize = 1 << 20;
/// Segments spanning at least this many cycles first try Levin collocation.
const LEVIN_MIN_CYCLES: f64 = 8.0;
const LEVIN_POINTS: (usize, usize) = (16, 24);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: C64,
    pub abs_error_estimate: f64,
    pub panels: usize,
    pub stationary_points: Vec<f64>,
}

/// Density multiplying the exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    Lebesgue,
    /// `sqrt(1 + p'(t)^2)`, arc length along the graph.
    ArcLength,
}

/// Phase in cycles: `Phi(t) = dx p(t) + dt t`.
#[derive(Clone, Copy)]
struct Phase<'a> {
    curve: &'a CurveSpec,
    dx: f64,
    dt: f64,
    weight: Weight,
}

impl Phase<'_> {
    #[inline]
    fn cycles(&self, t: f64) -> f64 {
        self.dx * self.curve.p(t) + self.dt * t
    }

    #[inline]
    fn deriv(&self, t: f64) -> f64 {
        self.dx * self.curve.dp(t) + self.dt
    }

    /// `w(t) exp(2 pi i Phi(t))`, each phase term reduced modulo one first.
    #[inline]
    fn integrand(&self, t: f64) -> C64 {
        let (p, d1, _) = self.curve.eval(t);
        let a = self.dx * p;
        let b = self.dt * t;
        let (s, c) = phase_sin_cos((a - a.round()) + (b - b.round()));
        let w = match self.weight {
            Weight::Lebesgue => 1.0,
            Weight::ArcLength => (1.0 + d1 * d1).sqrt(),
        };
        C64::new(w * c, w * s)
    }

    fn cis(&self, t: f64) -> C64 {
        let a = self.dx * self.curve.p(t);
        let b = self.dt * t;
        let (s, c) = phase_sin_cos((a - a.round()) + (b - b.round()));
        C64::new(c, s)
    }

    fn weight_at(&self, t: f64) -> f64 {
        match self.weight {
            Weight::Lebesgue => 1.0,
            Weight::ArcLength => (1.0 + self.curve.dp(t).powi(2)).sqrt(),
        }
    }
}

/// `int_0^T exp(2 pi i ((n-m) p(t) + (|n|^s - |m|^s) t)) dt`.
pub fn oscillatory_integral(n: i64, m: i64, s: f64, curve: &CurveSpec, t_end: f64, tol: f64) -> Result<QuadResult> {
    if n == m {
        return Ok(QuadResult {
            value: C64::new(t_end, 0.0),
            abs_error_estimate: 0.0,
            panels: 0,
            stationary_points: Vec::new(),
        });
    }
    let dt = temporal_freq(n, s) - temporal_freq(m, s);
    phase_integral(curve, (n - m) as f64, dt, 0.0, t_end, Weight::Lebesgue, tol)
}

/// `int_a^b w(t) exp(2 pi i (dx p(t) + dt t)) dt` to absolute accuracy `tol`.
///
/// Roots of the phase derivative become breakpoints, surrounded by dyadic
/// breakpoints down to width `1e-6 (b - a)`. Each monotone piece is split
/// until every panel spans at most half a cycle and the order-10 and
/// order-20 Gauss–Legendre values agree; pieces spanning many cycles are
/// first offered to Levin collocation.
pub fn phase_integral(
    curve: &CurveSpec,
    dx: f64,
    dt: f64,
    a: f64,
    b: f64,
    weight: Weight,
    tol: f64,
) -> Result<QuadResult> {
    if !(b > a) {
        return Ok(QuadResult {
            value: C64::new(0.0, 0.0),
            abs_error_estimate: 0.0,
            panels: 0,
            stationary_points: vec![],
        });
    }
    let phase = Phase { curve, dx, dt, weight };
    let roots = if dx == 0.0 { Vec::new() } else { derivative_roots(&phase, a, b) };
    let len = b - a;
    let mut breaks = vec![a, b];
    for &r in &roots {
        breaks.push(r);
        let mut h = len;
        while h >= 1e-6 * len {
            for x in [r - h, r + h] {
                if x > a && x < b {
                    breaks.push(x);
                }
            }
            h *= 0.5;
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * len);

    let mut value = C64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut panels = 0usize;
    let mut stack: Vec<(f64, f64)> = breaks.windows(2).rev().map(|w| (w[0], w[1])).collect();
    let min_width = 1e-14 * len;
    while let Some((lo, hi)) = stack.pop() {
        if panels >= PANEL_BUDGET {
            return Err(Error::ToleranceNotMet { tol, estimate: err, panels });
        }
        let width = hi - lo;
        let local_tol = (tol * width / len).max(1e-17);
        let cycles = (phase.cycles(hi) - phase.cycles(lo)).abs();
        if cycles <= 0.5 || width <= min_width {
            let g10: C64 = gl10().integrate(lo, hi, |t| phase.integrand(t));
            let g20: C64 = gl20().integrate(lo, hi, |t| phase.integrand(t));
            let e = (g10 - g20).norm();
            if e <= local_tol || width <= min_width {
                value += g20;
                err += e;
                panels += 1;
                continue;
            }
        } else if cycles >= LEVIN_MIN_CYCLES {
            if let Some((v, e)) = levin(&phase, lo, hi) {
                if e <= local_tol {
                    value += v;
                    err += e;
                    panels += 1;
                    continue;
                }
            }
        }
        let mid = 0.5 * (lo + hi);
        stack.push((mid, hi));
        stack.push((lo, mid));
    }
    if err > tol {
        return Err(Error::ToleranceNotMet { tol, estimate: err, panels });
    }
    Ok(QuadResult { value, abs_error_estimate: err, panels, stationary_points: roots })
}

/// Levin collocation on Chebyshev–Lobatto points: solve
/// `F' + 2 pi i Phi' F = w` and return `F e^{2 pi i Phi}` across the
/// panel, with the difference between two orders as the error estimate.
fn levin(phase: &Phase, lo: f64, hi: f64) -> Option<(C64, f64)> {
    let a = levin_order(phase, lo, hi, LEVIN_POINTS.0)?;
    let b = levin_order(phase, lo, hi, LEVIN_POINTS.1)?;
    Some((b, (a - b).norm()))
}

fn levin_order(phase: &Phase, lo: f64, hi: f64, n: usize) -> Option<C64> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let xs: Vec<f64> = (0..n).map(|j| (PI * j as f64 / (n - 1) as f64).cos()).collect();
    let c = |i: usize| {
        let base = if i == 0 || i == n - 1 { 2.0 } else { 1.0 };
        if i % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let d = c(i) / c(j) / (xs[i] - xs[j]) / half;
                m[(i, j)] = C64::new(d, 0.0);
                diag -= d;
            }
        }
        let t = mid + half * xs[i];
        m[(i, i)] = C64::new(diag, 2.0 * PI * phase.deriv(t));
    }
    let rhs: Vec<C64> = xs.iter().map(|x| C64::new(phase.weight_at(mid + half * x), 0.0)).collect();
    let f = solve(m, rhs)?;
    // xs[0] = 1 maps to hi, xs[n-1] = -1 maps to lo
    Some(f[0] * phase.cis(hi) - f[n - 1] * phase.cis(lo))
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn solve(mut m: CMatrix, mut rhs: Vec<C64>) -> Option<Vec<C64>> {
    let n = m.rows;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))?;
        if m[(piv, col)].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.data.swap(piv * n + k, col * n + k);
            }
            rhs.swap(piv, col);
        }
        let d = m[(col, col)];
        for r in (col + 1)..n {
            let f = m[(r, col)] / d;
            for k in col..n {
                let sub = f * m[(col, k)];
                m[(r, k)] -= sub;
            }
            let sub = f * rhs[col];
            rhs[r] -= sub;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for k in (i + 1)..n {
            acc -= m[(i, k)] * x[k];
        }
        x[i] = acc / m[(i, i)];
    }
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
}

/// Roots of `Phi'` on `(a, b)` by sign-change bracketing on a uniform plus
/// geometric grid, then bisection to width `1e-13`.
fn derivative_roots(phase: &Phase, a: f64, b: f64) -> Vec<f64> {
    let len = b - a;
    let mut grid: Vec<f64> = (0..=512).map(|k| a + len * k as f64 / 512.0).collect();
    grid.extend((1..48).map(|k| a + len * 0.5f64.powi(k + 8)));
    grid.sort_by(f64::total_cmp);
    let mut roots = Vec::new();
    let mut prev = (grid[0], phase.deriv(grid[0]));
    for &t in &grid[1..] {
        let d = phase.deriv(t);
        if prev.1 == 0.0 && prev.0 > a {
            roots.push(prev.0);
        } else if prev.1 * d < 0.0 {
            let (mut lo, mut hi) = (prev.0, t);
            let slo = prev.1.signum();
            while hi - lo > 1e-13 {
                let mid = 0.5 * (lo + hi);
                if phase.deriv(mid).signum() == slo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = (t, d);
    }
    roots
}

/// Interior roots of `phi'(t) = 1 + ((n-m)/(|n|^s - |m|^s)) p'(t)` on `(0, T)`;
/// empty when `|n| = |m|`.
pub fn stationary_points(n: i64, m: i64, s: f64, curve: &CurveSpec, t_end: f64) -> Vec<f64> {
    if n.abs() == m.abs() {
        return Vec::new();
    }
    let dt = temporal_freq(n, s) - temporal_freq(m, s);
    let phase = Phase { curve, dx: (n - m) as f64, dt, weight: Weight::Lebesgue };
    derivative_roots(&phase, 0.0, t_end)
}

/// Admissible range of the van der Corput parameter `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaRange {
    /// Exclusive lower end, `-(alpha - 1)`.
    pub lo: f64,
    pub hi: f64,
    pub hi_inclusive: bool,
}

impl EtaRange {
    pub fn contains(&self, eta: f64) -> bool {
        eta > self.lo && if self.hi_inclusive { eta <= self.hi } else { eta < self.hi }
    }
}

/// For `1 < s < 1 + 1/alpha`: `-(alpha-1) < eta < (s-1)(alpha-1)/(2-s)`;
/// otherwise `-(alpha-1) < eta <= 1`.
pub fn eta_range(s: f64, alpha: f64) -> EtaRange {
    let lo = -(alpha - 1.0);
    if s > 1.0 && s < 1.0 + 1.0 / alpha {
        EtaRange { lo, hi: (s - 1.0) * (alpha - 1.0) / (2.0 - s), hi_inclusive: false }
    } else {
        EtaRange { lo, hi: 1.0, hi_inclusive: true }
    }
}

/// Time below which the basic estimates are stated: `(3(alpha-1)/(4 pi c1))^{1/alpha}`.
pub fn t0_threshold(curve: &CurveSpec) -> f64 {
    (3.0 * (curve.alpha - 1.0) / (4.0 * PI * curve.c1)).powf(1.0 / curve.alpha)
}

/// Time above which the bad-pair estimate with parameter `eta` holds.
pub fn t1_threshold(eta: f64, alpha: f64) -> f64 {
    if eta > 0.0 && eta < 1.0 {
        4f64.powf(eta / ((1.0 - eta) * (alpha - 1.0)))
    } else if eta >= 1.0 {
        0.0
    } else {
        1.0
    }
}

/// Constant-free van der Corput bound for `|I_{m,n}(T)|`; `None` on the diagonal.
pub fn vdc_theoretical_bound(n: i64, m: i64, s: f64, curve: &CurveSpec, t_end: f64, eta: f64) -> Result<Option<f64>> {
    let range = eta_range(s, curve.alpha);
    if !range.contains(eta) {
        let close = if range.hi_inclusive { "]" } else { ")" };
        return Err(Error::InadmissibleEta { eta, range: format!("({}, {}{close}", range.lo, range.hi) });
    }
    let class = classify_pair(n, m, s, tau_threshold(curve, t_end));
    let a = curve.alpha;
    let diff = (temporal_freq(n, s) - temporal_freq(m, s)).abs();
    Ok(match class.tag {
        PairTag::Diagonal => None,
        PairTag::GoodPlus | PairTag::GoodMinus => Some(1.0 / diff),
        PairTag::AntiDiagonal => Some((n.abs() as f64).powf(-1.0 / a)),
        PairTag::Bad => Some(
            t_end.powf(0.5 * (1.0 - eta))
                * ((n - m).abs() as f64).powf(-eta / (2.0 * (a - 1.0)))
                * diff.powf(-(a - 1.0 - eta) / (2.0 * (a - 1.0))),
        ),
    })
}

/// Largest observed `|I_{m,n}| / bound` per pair class over `|n|, |m| <= n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VdcConstants {
    pub good: f64,
    pub antidiagonal: f64,
    pub bad: f64,
    pub pairs: usize,
}

pub fn vdc_constant_scan(
    curve: &CurveSpec,
    s: f64,
    t_end: f64,
    eta: f64,
    n_max: i64,
    tol: f64,
) -> Result<VdcConstants> {
    let mut out = VdcConstants { good: 0.0, antidiagonal: 0.0, bad: 0.0, pairs: 0 };
    let tau = tau_threshold(curve, t_end);
    for n in -n_max..=n_max {
        for m in -n_max..=n_max {
            let Some(bound) = vdc_theoretical_bound(n, m, s, curve, t_end, eta)? else { continue };
            let i = oscillatory_integral(n, m, s, curve, t_end, tol)?.value.norm();
            let ratio = i / bound;
            let slot = match classify_pair(n, m, s, tau).tag {
                PairTag::AntiDiagonal => &mut out.antidiagonal,
                PairTag::Bad => &mut out.bad,
                _ => &mut out.good,
            };
            *slot = slot.max(ratio);
            out.pairs += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::CurveSpec;

    fn simpson(f: impl Fn(f64) -> C64, a: f64, b: f64, n: usize) -> C64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(a + h * k as f64) * w;
        }
        acc * (h / 3.0)
    }

    #[test]
    fn fresnel_case_matches_simpson() {
        let p = CurveSpec::monomial(2.0).unwrap();
        let got = oscillatory_integral(1, -1, 2.0, &p, 1.0, 1e-12).unwrap();
        let oracle = simpson(|t| C64::from_polar(1.0, 4.0 * PI * t * t), 0.0, 1.0, 200_000);
        assert!((got.value - oracle).norm() < 1e-8, "{} vs {}", got.value, oracle);
    }

    #[test]
    fn stationary_point_of_the_worked_example() {
        let p = CurveSpec::monomial(2.0).unwrap();
        let r = stationary_points(1, -2, 2.0, &p, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-12);
        let q = oscillatory_integral(1, -2, 2.0, &p, 1.0, 1e-12).unwrap();
        let oracle = simpson(|t| C64::from_polar(1.0, 2.0 * PI * (3.0 * t * t - 3.0 * t)), 0.0, 1.0, 200_000);
        assert!((q.value - oracle).norm() < 1e-9);
    }

    #[test]
    fn levin_agrees_with_panels_at_high_frequency() {
        let p = CurveSpec::monomial(1.5).unwrap();
        let (dx, dt) = (7.0, 4000.0);
        let full = phase_integral(&p, dx, dt, 0.0, 1.0, Weight::ArcLength, 1e-12).unwrap();
        let oracle = simpson(
            |t| {
                let (v, d1, _) = p.eval(t);
                C64::from_polar((1.0 + d1 * d1).sqrt(), 2.0 * PI * (dx * v + dt * t))
            },
            0.0,
            1.0,
            2_000_000,
        );
        assert!((full.value - oracle).norm() < 1e-9, "{} vs {}", full.value, oracle);
        assert!(full.panels < 2 * 4000, "Levin should shortcut most half-cycles: {}", full.panels);
    }

    #[test]
    fn extreme_frequencies_stay_cheap() {
        let p = CurveSpec::monomial(2.0).unwrap();
        let dt = temporal_freq(20, 8.0) - 1.0;
        let q = phase_integral(&p, 19.0, dt, 0.0, 0.5, Weight::Lebesgue, 1e-14).unwrap();
        // leading non-stationary asymptotics: boundary terms of size 1/(2 pi Phi')
        let asym = (q.value.norm() * 2.0 * PI * dt).abs();
        assert!(asym < 2.5 && q.panels < 1000, "{} {}", asym, q.panels);
    }

    #[test]
    fn worked_bounds() {
        let p = CurveSpec::monomial(2.0).unwrap();
        let b = vdc_theoretical_bound(5, 2, 2.0, &p, 1.0, 0.5).unwrap().unwrap();
        assert!((b - 1.0 / 21.0).abs() < 1e-14);
        let b = vdc_theoretical_bound(3, -3, 2.0, &p, 1.0, 0.5).unwrap().unwrap();
        assert!((b - 3f64.powf(-0.5)).abs() < 1e-14);
        assert!(matches!(vdc_theoretical_bound(2, 1, 1.4, &p, 1.0, 1.0), Err(Error::InadmissibleEta { .. })));
        assert_eq!(vdc_theoretical_bound(2, 2, 2.0, &p, 1.0, 0.5).unwrap(), None);
    }

    #[test]
    fn thresholds() {
        let p = CurveSpec::monomial(2.0).unwrap();
        assert!((t0_threshold(&p) - (3.0 / (8.0 * PI)).sqrt()).abs() < 1e-15);
        assert_eq!(t1_threshold(0.0, 2.0), 1.0);
        assert!((t1_threshold(0.5, 2.0) - 4.0).abs() < 1e-12);
    }
}
