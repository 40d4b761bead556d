//! Low-frequency rigidity: when can `sum_{|n| <= N} c_n e^{2 pi i (|n|^s t + lambda_n x)}`
//! vanish along a curve?
//!
//! The three-function case is decided by a Wronskian, the general case by a
//! Vandermonde determinant, and a three-point criterion replaces the curve
//! by finitely many points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classify::temporal_freq;
use crate::curves::phase_sin_cos;
use crate::error::{invalid, Error, Result};
use crate::linalg::{determinant, rank, CMatrix, C64};

fn cis(cycles: f64) -> C64 {
    let (s, c) = phase_sin_cos(cycles);
    C64::new(c, s)
}

/// A real function `gamma` together with its first two derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ObservationCurveGamma {
    /// `gamma(u) = beta + slope u`.
    Affine { beta: f64, slope: f64 },
    /// The line `{(t, x0)}`; as a function it is the constant `x0`.
    Horizontal { x0: f64 },
    /// `sum_k coeffs[k] u^k`.
    Polynomial { coeffs: Vec<f64> },
    /// `num(u) / den(u)`, coefficients in increasing degree.
    Rational { num: Vec<f64>, den: Vec<f64> },
}

fn poly3(c: &[f64], u: f64) -> (f64, f64, f64) {
    let (mut p, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &a in c.iter().rev() {
        d2 = d2 * u + 2.0 * d1;
        d1 = d1 * u + p;
        p = p * u + a;
    }
    (p, d1, d2)
}

impl ObservationCurveGamma {
    /// `(gamma, gamma', gamma'')` at `u`.
    pub fn eval(&self, u: f64) -> (f64, f64, f64) {
        match self {
            Self::Affine { beta, slope } => (beta + slope * u, *slope, 0.0),
            Self::Horizontal { x0 } => (*x0, 0.0, 0.0),
            Self::Polynomial { coeffs } => poly3(coeffs, u),
            Self::Rational { num, den } => {
                let (p, p1, p2) = poly3(num, u);
                let (q, q1, q2) = poly3(den, u);
                let r = p / q;
                let r1 = (p1 - r * q1) / q;
                let r2 = (p2 - 2.0 * r1 * q1 - r * q2) / q;
                (r, r1, r2)
            }
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.eval(u).0
    }

    /// Rejects empty polynomials and rational functions whose denominator
    /// vanishes on `[0, t_end]` (checked on a fine grid).
    pub fn validate(&self, t_end: f64) -> Result<()> {
        match self {
            Self::Polynomial { coeffs } if coeffs.is_empty() => Err(invalid("empty polynomial")),
            Self::Rational { num, den } => {
                if num.is_empty() || den.is_empty() {
                    return Err(invalid("empty rational function"));
                }
                let scale = den.iter().map(|c| c.abs()).fold(0.0, f64::max);
                let mut prev = poly3(den, 0.0).0;
                for k in 0..=4096 {
                    let q = poly3(den, t_end * k as f64 / 4096.0).0;
                    if q.abs() <= 1e-12 * scale || q.signum() != prev.signum() {
                        return Err(invalid("denominator vanishes on the interval"));
                    }
                    prev = q;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

// ---------------------------------------------------------------------------
// Three exponentials along t = gamma(x)
// ---------------------------------------------------------------------------

/// `e_n(gamma(x), x)` for `n = -1, 0, 1` (`|n|^s = |n|` for these `n`).
fn three_functions(gamma: &ObservationCurveGamma, x: f64) -> [C64; 3] {
    let g = gamma.value(x);
    [cis(g - x), C64::new(1.0, 0.0), cis(g + x)]
}

/// Wronskian of `f_- = e^{2 pi i (gamma - x)}`, `1`, `f_+ = e^{2 pi i (gamma + x)}`
/// in the factorised form `-8 pi^2 (gamma'' - 2 pi i (gamma'^2 - 1)) f_+ f_-`.
///
/// The curve is read as `t = gamma(x)`. The horizontal line `{(t, x0)}` is
/// not such a graph; along it the two non-constant exponentials are
/// proportional and the Wronskian is zero.
pub fn wronskian_n1(gamma: &ObservationCurveGamma, x: f64) -> C64 {
    if let ObservationCurveGamma::Horizontal { .. } = gamma {
        return C64::new(0.0, 0.0);
    }
    let (g, g1, g2) = gamma.eval(x);
    let bracket = C64::new(g2, -2.0 * PI * (g1 * g1 - 1.0));
    -8.0 * PI * PI * bracket * cis(g + x) * cis(g - x)
}

/// The same Wronskian as a `3 x 3` determinant of central differences with
/// step `h`.
pub fn wronskian_fd(gamma: &ObservationCurveGamma, x: f64, h: f64) -> C64 {
    let lo = three_functions(gamma, x - h);
    let mid = three_functions(gamma, x);
    let hi = three_functions(gamma, x + h);
    let m = CMatrix::from_fn(3, 3, |k, j| match k {
        0 => mid[j],
        1 => (hi[j] - lo[j]) / (2.0 * h),
        _ => (hi[j] - 2.0 * mid[j] + lo[j]) / (h * h),
    });
    determinant(&m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum N1Case {
    /// The line `{(t, x0)}`.
    Horizontal,
    /// `t = beta - x`.
    SlopeMinusOne,
    /// `t = beta + x`.
    SlopePlusOne,
    /// Only `c = 0` vanishes along the curve.
    OnlyTrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct N1Classification {
    pub case: N1Case,
    /// `x0` or `beta`; zero in the trivial case.
    pub parameter: f64,
    pub relation: String,
    /// `(c_{-1}, c_0, c_1)` spanning the vanishing combinations.
    pub witness: [C64; 3],
    /// Samples at which the Wronskian is not zero.
    pub nonvanishing_samples: usize,
}

const FORM_TOL: f64 = 1e-9;

/// Decides which combinations of `1, e_{+-1}` vanish along `t = gamma(x)`.
pub fn n1_vanishing_classifier(gamma: &ObservationCurveGamma, samples: &[f64]) -> Result<N1Classification> {
    if samples.len() < 3 {
        return Err(Error::AmbiguousCurve(format!("{} samples, at least 3 needed", samples.len())));
    }
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    if let ObservationCurveGamma::Horizontal { x0 } = gamma {
        return Ok(N1Classification {
            case: N1Case::Horizontal,
            parameter: *x0,
            relation: format!("c_0 = 0, c_-1 e^(-2 pi i {x0}) + c_1 e^(2 pi i {x0}) = 0"),
            witness: [cis(*x0), zero, -cis(-*x0)],
            nonvanishing_samples: 0,
        });
    }
    let derivs: Vec<(f64, f64, f64)> = samples.iter().map(|&x| gamma.eval(x)).collect();
    let straight = derivs.iter().all(|d| d.2.abs() <= FORM_TOL);
    for sign in [1.0, -1.0] {
        if straight && derivs.iter().all(|d| (d.1 - sign).abs() <= FORM_TOL) {
            let beta = derivs[0].0 - sign * samples[0];
            let e = cis(beta);
            return Ok(if sign > 0.0 {
                // e_{-1} = e^{2 pi i beta} is constant along the line
                N1Classification {
                    case: N1Case::SlopePlusOne,
                    parameter: beta,
                    relation: format!("c_1 = 0, c_-1 e^(2 pi i {beta}) + c_0 = 0"),
                    witness: [one, -e, zero],
                    nonvanishing_samples: 0,
                }
            } else {
                N1Classification {
                    case: N1Case::SlopeMinusOne,
                    parameter: beta,
                    relation: format!("c_-1 = 0, c_0 + c_1 e^(2 pi i {beta}) = 0"),
                    witness: [zero, -e, one],
                    nonvanishing_samples: 0,
                }
            });
        }
    }
    let nonvanishing = samples.iter().filter(|&&x| wronskian_n1(gamma, x).norm() > FORM_TOL).count();
    if 2 * nonvanishing <= samples.len() {
        return Err(Error::AmbiguousCurve(format!(
            "Wronskian vanishes at {} of {} samples but the curve is not a unit-slope line",
            samples.len() - nonvanishing,
            samples.len()
        )));
    }
    Ok(N1Classification {
        case: N1Case::OnlyTrivial,
        parameter: 0.0,
        relation: "c_-1 = c_0 = c_1 = 0".into(),
        witness: [zero; 3],
        nonvanishing_samples: nonvanishing,
    })
}

/// `c_-1 e_{-1} + c_0 + c_1 e_1` at the point of parameter `u`: `(u, x0)`
/// on a horizontal line and `(gamma(u), u)` otherwise.
pub fn n1_combination(gamma: &ObservationCurveGamma, c: &[C64; 3], u: f64) -> C64 {
    let f = match gamma {
        ObservationCurveGamma::Horizontal { x0 } => [cis(u - x0), C64::new(1.0, 0.0), cis(u + x0)],
        _ => three_functions(gamma, u),
    };
    c[0] * f[0] + c[1] * f[1] + c[2] * f[2]
}

// ---------------------------------------------------------------------------
// Vandermonde core
// ---------------------------------------------------------------------------

/// Smallest allowed gap between spatial frequencies.
pub const LAMBDA_GAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowFreqSystem {
    pub n: usize,
    pub s: f64,
    pub lambdas: Vec<f64>,
    pub coefficients: Vec<C64>,
}

impl LowFreqSystem {
    pub fn new(n: usize, s: f64, lambdas: Vec<f64>, coefficients: Vec<C64>) -> Result<Self> {
        if lambdas.len() != 2 * n + 1 || coefficients.len() != 2 * n + 1 {
            return Err(invalid(format!("{} frequencies and coefficients required", 2 * n + 1)));
        }
        check_distinct(&lambdas)?;
        if !(s > 0.0) {
            return Err(invalid("s must be positive"));
        }
        Ok(Self { n, s, lambdas, coefficients })
    }

    /// `F(t, x) = sum_{n=-N}^{N} c_n e^{2 pi i (|n|^s t + lambda_n x)}`.
    pub fn eval(&self, t: f64, x: f64) -> C64 {
        let n = self.n as i64;
        (-n..=n)
            .zip(self.lambdas.iter().zip(&self.coefficients))
            .map(|(k, (l, c))| {
                let a = temporal_freq(k, self.s) * t;
                let b = l * x;
                c * cis((a - a.round()) + (b - b.round()))
            })
            .sum()
    }

    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_distinct(lambdas: &[f64]) -> Result<()> {
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] < LAMBDA_GAP) {
        return Err(invalid("frequencies must be pairwise distinct"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VandermondeReport {
    /// `|det V|` from the product formula.
    pub det_abs: f64,
    /// `|det V|` from LU factorisation.
    pub det_abs_lu: f64,
    pub invertible: bool,
    /// Some `lambda_n = 0`, which zeroes a column when powers start at 1.
    pub zero_frequency: bool,
}

/// `V_{m,n} = (2 pi i lambda_n)^m` for `m = 1..=K`:
/// `|det V| = prod_n |2 pi lambda_n| prod_{j<k} 2 pi |lambda_k - lambda_j|`.
pub fn vandermonde_rank(lambdas: &[f64]) -> Result<VandermondeReport> {
    if lambdas.is_empty() {
        return Err(invalid("no frequencies"));
    }
    check_distinct(lambdas)?;
    let k = lambdas.len();
    let mut det = 1.0;
    for (j, &a) in lambdas.iter().enumerate() {
        det *= 2.0 * PI * a.abs();
        for &b in &lambdas[j + 1..] {
            det *= 2.0 * PI * (b - a).abs();
        }
    }
    // rows equilibrated so partial pivoting sees comparable magnitudes
    let top = lambdas.iter().fold(0.0f64, |a, &l| a.max(2.0 * PI * l.abs()));
    let v = CMatrix::from_fn(k, k, |m, n| (C64::new(0.0, 2.0 * PI * lambdas[n]) / top).powi(m as i32 + 1));
    let scale: f64 = (1..=k).map(|m| top.powi(m as i32)).product();
    let det_lu = determinant(&v).norm() * scale;
    let zero_frequency = lambdas.contains(&0.0);
    Ok(VandermondeReport { det_abs: det, det_abs_lu: det_lu, invertible: !zero_frequency, zero_frequency })
}

// ---------------------------------------------------------------------------
// Three points
// ---------------------------------------------------------------------------

/// Tolerance on residues modulo the progression step.
pub const RESIDUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreePointReport {
    pub rank: usize,
    /// `max_j |F(A_j)|` for the supplied coefficients.
    pub residual: Option<f64>,
}

fn congruent(a: f64, b: f64, step: f64) -> bool {
    let r = (a - b).rem_euclid(step);
    r.min(step - r) <= RESIDUE_TOL * step.max(1.0)
}

/// Checks that `F(t, x) = c_-1 e^{i(t-x)} + c_0 + c_1 e^{i(t+x)}` vanishing
/// at the points `(t_j, x_j)` forces `c = 0`.
///
/// The points are rejected when two of the `x_j` agree modulo `pi` or when
/// all of the `t_j + x_j` (respectively `t_j - x_j`) agree modulo `2 pi`.
pub fn three_point_test(points: &[[f64; 2]; 3], c: Option<[C64; 3]>) -> Result<ThreePointReport> {
    let m = CMatrix::from_fn(3, 3, |j, k| {
        let [t, x] = points[j];
        match k {
            0 => C64::from_polar(1.0, t - x),
            1 => C64::new(1.0, 0.0),
            _ => C64::from_polar(1.0, t + x),
        }
    });
    let r = rank(&m, 1e-9);
    let mut violations = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            if congruent(points[i][1], points[j][1], PI) {
                violations.push(format!("x_{} and x_{} agree modulo pi", i + 1, j + 1));
            }
        }
    }
    for (sign, name) in [(1.0, "t + x"), (-1.0, "t - x")] {
        let v: Vec<f64> = points.iter().map(|p| p[0] + sign * p[1]).collect();
        if congruent(v[0], v[1], 2.0 * PI) && congruent(v[0], v[2], 2.0 * PI) {
            violations.push(format!("the values {name} agree modulo 2 pi"));
        }
    }
    if !violations.is_empty() {
        return Err(Error::InadmissiblePoints { violations, rank: r });
    }
    let residual = c.map(|c| m.mul_vec(&c).iter().map(|z| z.norm()).fold(0.0, f64::max));
    Ok(ThreePointReport { rank: r, residual })
}

// ---------------------------------------------------------------------------
// Zero sets along curves
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroVerdict {
    IsolatedZerosOnly,
    SuspectedIdenticallyZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroProbe {
    /// Refined local minima of `|F|` below `1e-8 ||c||`.
    pub zeros: Vec<f64>,
    pub max_abs: f64,
    pub min_abs: f64,
    pub verdict: ZeroVerdict,
}

/// Uniform-smallness threshold, relative to `||c||`.
pub const IDENTICALLY_ZERO_TOL: f64 = 1e-10;

/// Samples `|F(t, gamma(t))|` on `grid` uniform points of `[0, T]`.
///
/// An accumulation of zeros cannot be seen numerically; the verdict is the
/// proxy `max |F| < 1e-10 ||c||` over the grid.
pub fn zero_set_probe(
    system: &LowFreqSystem,
    gamma: &ObservationCurveGamma,
    t_end: f64,
    grid: usize,
) -> Result<ZeroProbe> {
    if grid < 3 || !(t_end > 0.0) {
        return Err(invalid("need a positive interval and at least 3 grid points"));
    }
    gamma.validate(t_end)?;
    let norm = system.coefficient_norm();
    let f = |t: f64| system.eval(t, gamma.value(t)).norm();
    let ts: Vec<f64> = (0..grid).map(|k| t_end * k as f64 / (grid - 1) as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let max_abs = vals.iter().cloned().fold(0.0, f64::max);
    let mut min_abs = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let verdict = if norm == 0.0 || max_abs < IDENTICALLY_ZERO_TOL * norm {
        ZeroVerdict::SuspectedIdenticallyZero
    } else {
        ZeroVerdict::IsolatedZerosOnly
    };
    let mut zeros = Vec::new();
    if verdict == ZeroVerdict::IsolatedZerosOnly {
        for k in 1..grid - 1 {
            if vals[k] <= vals[k - 1] && vals[k] <= vals[k + 1] {
                let (t, v) = golden_min(&f, ts[k - 1], ts[k + 1]);
                min_abs = min_abs.min(v);
                if v <= 1e-8 * norm {
                    zeros.push(t);
                }
            }
        }
    }
    Ok(ZeroProbe { zeros, max_abs, min_abs, verdict })
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> ObservationCurveGamma {
        ObservationCurveGamma::Polynomial { coeffs: c.to_vec() }
    }

    #[test]
    fn wronskian_examples() {
        let line = ObservationCurveGamma::Affine { beta: 0.4, slope: 1.0 };
        assert_eq!(wronskian_n1(&line, 0.3).norm(), 0.0);
        let sq = poly(&[0.0, 0.0, 1.0]);
        for x in [0.0, 0.3, 1.7] {
            let w = wronskian_n1(&sq, x).norm();
            let want = 8.0 * PI * PI * C64::new(2.0, -2.0 * PI * (4.0 * x * x - 1.0)).norm();
            assert!((w - want).abs() < 1e-9 * want && w >= 16.0 * PI * PI);
        }
        let two = ObservationCurveGamma::Affine { beta: 0.0, slope: 2.0 };
        assert!((wronskian_n1(&two, 0.8).norm() - 48.0 * PI.powi(3)).abs() < 1e-9);
    }

    #[test]
    fn wronskian_matches_differences() {
        for g in
            [poly(&[0.1, -0.5, 0.8, 0.3]), ObservationCurveGamma::Rational { num: vec![1.0, 0.5], den: vec![2.0, 0.3] }]
        {
            for x in [0.1, 0.5, 0.9] {
                let a = wronskian_n1(&g, x);
                let b = wronskian_fd(&g, x, 1e-5);
                assert!((a - b).norm() < 1e-4 * a.norm(), "{a} {b}");
            }
        }
    }

    #[test]
    fn classifier_cases_and_witnesses() {
        let samples = [0.1, 0.4, 0.7, 0.95];
        let cases = [
            (ObservationCurveGamma::Horizontal { x0: 0.25 }, N1Case::Horizontal),
            (ObservationCurveGamma::Affine { beta: 0.3, slope: 1.0 }, N1Case::SlopePlusOne),
            (ObservationCurveGamma::Affine { beta: -0.2, slope: -1.0 }, N1Case::SlopeMinusOne),
        ];
        for (g, want) in cases {
            let r = n1_vanishing_classifier(&g, &samples).unwrap();
            assert_eq!(r.case, want);
            for k in 0..50 {
                assert!(n1_combination(&g, &r.witness, 0.037 * k as f64).norm() < 1e-13);
            }
        }
        let h = n1_vanishing_classifier(&ObservationCurveGamma::Horizontal { x0: 0.25 }, &samples).unwrap();
        // c_-1 e^{-i pi / 2} + c_1 e^{i pi / 2} = 0
        assert!((h.witness[0] * cis(-0.25) + h.witness[2] * cis(0.25)).norm() < 1e-15);
        let sq = n1_vanishing_classifier(&poly(&[0.0, 0.0, 1.0]), &samples).unwrap();
        assert_eq!(sq.case, N1Case::OnlyTrivial);
        assert!(matches!(n1_vanishing_classifier(&sq_line(), &[0.0, 1.0]), Err(Error::AmbiguousCurve(_))));
    }

    fn sq_line() -> ObservationCurveGamma {
        poly(&[0.0, 0.0, 1.0])
    }

    #[test]
    fn vandermonde_examples() {
        let r = vandermonde_rank(&[-1.0, 0.5, 1.0]).unwrap();
        assert!(r.invertible && r.det_abs > 0.0);
        assert!((r.det_abs - r.det_abs_lu).abs() < 1e-10 * r.det_abs);
        let z = vandermonde_rank(&[-1.0, 0.0, 1.0]).unwrap();
        assert!(!z.invertible && z.det_abs == 0.0 && z.det_abs_lu == 0.0);
        assert!(LowFreqSystem::new(1, 1.0, vec![1.0, 1.0, 2.0], vec![C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn three_point_examples() {
        let pts = [[0.0, 0.3], [0.7, 1.1], [1.9, 2.6]];
        assert_eq!(three_point_test(&pts, None).unwrap().rank, 3);
        let shifted = [[2.0 * PI, 0.3], [0.7, 1.1], [1.9 + 4.0 * PI, 2.6]];
        assert_eq!(three_point_test(&shifted, None).unwrap().rank, 3);
        let flat = [[0.0, 0.0], [PI, 0.0], [2.0 * PI, 0.0]];
        match three_point_test(&flat, None) {
            Err(Error::InadmissiblePoints { violations, .. }) => assert!(!violations.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_probe_examples() {
        let one = C64::new(1.0, 0.0);
        let sys = LowFreqSystem::new(1, 1.0, vec![-1.0, 0.0, 1.0], vec![one, -2.0 * one, one]).unwrap();
        let p = zero_set_probe(&sys, &sq_line(), 1.0, 2001).unwrap();
        assert_eq!(p.verdict, ZeroVerdict::IsolatedZerosOnly);
        let zero = LowFreqSystem::new(1, 1.0, vec![-1.0, 0.0, 1.0], vec![C64::new(0.0, 0.0); 3]).unwrap();
        assert_eq!(zero_set_probe(&zero, &sq_line(), 1.0, 11).unwrap().verdict, ZeroVerdict::SuspectedIdenticallyZero);
        // x = t + beta, i.e. t = x - beta: e_{-1} = e^{-2 pi i beta} is constant
        let beta = 0.37;
        let w = LowFreqSystem::new(1, 1.0, vec![-1.0, 0.0, 1.0], vec![one, -cis(-beta), C64::new(0.0, 0.0)]).unwrap();
        let line = ObservationCurveGamma::Affine { beta, slope: 1.0 };
        let p = zero_set_probe(&w, &line, 1.0, 1001).unwrap();
        assert!(p.max_abs < 1e-10);
        assert_eq!(p.verdict, ZeroVerdict::SuspectedIdenticallyZero);
    }
}
