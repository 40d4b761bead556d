//! Independent reference computations used to check the main algorithms.
//!
//! Everything here is deliberately naive: uniform Simpson rules, full
//! brute-force scans and closed forms, sharing no code paths with the
//! adaptive routines they check.

use std::f64::consts::PI;

use crate::curves::CurveSpec;
use crate::linalg::C64;

fn cis(cycles: f64) -> C64 {
    let r = cycles - cycles.round();
    let (s, c) = (2.0 * PI * r).sin_cos();
    C64::new(c, s)
}

fn simpson_weight(k: usize, intervals: usize, h: f64) -> f64 {
    if k == 0 || k == intervals {
        h / 3.0
    } else if k % 2 == 1 {
        4.0 * h / 3.0
    } else {
        2.0 * h / 3.0
    }
}

/// Composite Simpson values of `int_0^T exp(2 pi i ((n-m) p(t) + (|n|^s - |m|^s) t)) dt`
/// for every `n > m` with `|n|, |m| <= n_max` and every `s` in `s_values`.
///
/// `exp(2 pi i d p(t_k))` is tabulated once per `d = n - m`; the linear
/// phase is advanced by a rotation recurrence that is resynchronised every
/// 1024 nodes. Entries are `(s_index, n, m, value)`.
pub fn simpson_pair_integrals(
    curve: &CurveSpec,
    t_end: f64,
    s_values: &[f64],
    n_max: i64,
    intervals: usize,
) -> Vec<(usize, i64, i64, C64)> {
    assert!(intervals % 2 == 0, "Simpson needs an even number of intervals");
    let h = t_end / intervals as f64;
    let weights: Vec<f64> = (0..=intervals).map(|k| simpson_weight(k, intervals, h)).collect();
    let ps: Vec<f64> = (0..=intervals).map(|k| curve.p(h * k as f64)).collect();
    let mut out = Vec::new();
    let mut table = vec![C64::new(0.0, 0.0); intervals + 1];
    for d in 1..=2 * n_max {
        for (a, p) in table.iter_mut().zip(&ps) {
            *a = cis(d as f64 * p);
        }
        for m in -n_max..=n_max - d {
            let n = m + d;
            for (si, &s) in s_values.iter().enumerate() {
                let delta = (n.abs() as f64).powf(s) - (m.abs() as f64).powf(s);
                let step = cis(delta * h);
                let mut z = C64::new(1.0, 0.0);
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..=intervals {
                    if k % 1024 == 0 {
                        z = cis(delta * h * k as f64);
                    }
                    acc += table[k] * z * weights[k];
                    z *= step;
                }
                out.push((si, n, m, acc));
            }
        }
    }
    out
}

/// `sup |n-m| / ||n|^s - |m|^s|^gamma` over the full square `|n|, |m| <= N`.
pub fn brute_force_sup(gamma: f64, s: f64, n_trunc: i64) -> f64 {
    let pw: Vec<f64> = (0..=n_trunc).map(|k| (k as f64).powf(s)).collect();
    let mut best: f64 = 0.0;
    for n in -n_trunc..=n_trunc {
        let pn = pw[n.unsigned_abs() as usize];
        for m in -n_trunc..=n_trunc {
            if n.abs() == m.abs() {
                continue;
            }
            let den = (pn - pw[m.unsigned_abs() as usize]).abs();
            let v = (n - m).abs() as f64 / if gamma == 1.0 { den } else { den.powf(gamma) };
            best = best.max(v);
        }
    }
    best
}

/// `2 sum_{n >= N} n^{-2}` in closed form (`gamma = 0`, `delta = 1`, `s = 2`,
/// `m = 0`).
pub fn basel_tail(n_start: u64) -> f64 {
    let head: f64 = (1..n_start).map(|n| 1.0 / (n as f64 * n as f64)).sum();
    2.0 * (PI * PI / 6.0 - head)
}

/// Simpson value of `int_0^1 |1 - exp(2 pi i (j (p(T tau) - p(0)) + j^s T tau))|^2 dtau`.
pub fn simpson_minimal_time(curve: &CurveSpec, s: f64, j: i64, t_j: f64, intervals: usize) -> f64 {
    let h = 1.0 / intervals as f64;
    let jf = j as f64;
    let p0 = curve.p(0.0);
    (0..=intervals)
        .map(|k| {
            let tau = h * k as f64;
            let phi = jf * (curve.p(t_j * tau) - p0) + jf.powf(s) * t_j * tau;
            let z = C64::new(1.0, 0.0) - cis(phi);
            simpson_weight(k, intervals, h) * z.norm_sqr()
        })
        .sum()
}

/// Simpson values of `int_0^T |sum_n c_n exp(2 pi i (n p(t) + |n|^s t))|^2 dt`
/// for several coefficient vectors indexed by `indices`.
pub fn simpson_curve_norms(
    coeffs: &[Vec<C64>],
    indices: &[i64],
    s: f64,
    curve: &CurveSpec,
    t_end: f64,
    intervals: usize,
) -> Vec<f64> {
    let h = t_end / intervals as f64;
    let mut out = vec![0.0; coeffs.len()];
    let mut e = vec![C64::new(0.0, 0.0); indices.len()];
    for k in 0..=intervals {
        let t = h * k as f64;
        let x = curve.p(t);
        for (ek, &n) in e.iter_mut().zip(indices) {
            *ek = cis(n as f64 * x) * cis((n.abs() as f64).powf(s) * t);
        }
        let w = simpson_weight(k, intervals, h);
        for (o, c) in out.iter_mut().zip(coeffs) {
            let u: C64 = c.iter().zip(&e).map(|(a, b)| a * b).sum();
            *o += w * u.norm_sqr();
        }
    }
    out
}

/// `sum_{1 <= n != m <= N} (1 + (n^s - m^s)^2)^{-delta/2}` by a full double loop.
pub fn brute_force_sharpness(delta: f64, s: f64, n: i64) -> f64 {
    let mut acc = 0.0;
    for a in 1..=n {
        for b in 1..=n {
            if a != b {
                let d = (a as f64).powf(s) - (b as f64).powf(s);
                acc += (1.0 + d * d).powf(-0.5 * delta);
            }
        }
    }
    acc
}

/// Bessel `J_0(x) = (1/pi) int_0^pi cos(x sin th) dth` by composite Simpson
/// with about 40 nodes per oscillation.
pub fn bessel_j0(x: f64) -> f64 {
    let intervals = 2 * ((20.0 * x.abs()).ceil() as usize + 200);
    let h = PI / intervals as f64;
    (0..=intervals).map(|k| simpson_weight(k, intervals, h) * (x * (h * k as f64).sin()).cos()).sum::<f64>() / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_values() {
        // tabulated values of J_0
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-12);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-12);
    }

    #[test]
    fn brute_sup_small() {
        assert!((brute_force_sup(1.0, 2.0, 50) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_diagonal_shift() {
        // n - m = 1, s = 1 pair (1, 0) on the line p = 0 is int e^{2 pi i t}
        let flat = crate::curves::build_curve(crate::curves::CurveKind::Affine { intercept: 0.0, slope: 1.0 }).unwrap();
        let v = simpson_pair_integrals(&flat, 0.25, &[1.0], 1, 2000);
        let (_, n, m, z) = v.iter().find(|e| e.1 == 1 && e.2 == 0).unwrap();
        assert_eq!((*n, *m), (1, 0));
        // int_0^{1/4} e^{2 pi i (t + t)} dt
        let want = (cis(0.5) - 1.0) / C64::new(0.0, 4.0 * PI);
        assert!((z - want).norm() < 1e-12);
    }
}
