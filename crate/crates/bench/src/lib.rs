//! Shared fixtures for the criterion benchmarks in `benches/`.

use curved_ingham::curves::CurveSpec;
use curved_ingham::linalg::{CMatrix, C64};
use curved_ingham::riesz::ExpSystem;

/// `p(t) = t^2`, the curve used throughout the benchmarks.
pub fn parabola() -> CurveSpec {
    CurveSpec::monomial(2.0).expect("t^2 is admissible")
}

/// Indices `-n..n` with `s = 2` on the parabola over `[0, t_end]`.
pub fn parabola_system(n: i64, t_end: f64) -> ExpSystem {
    ExpSystem::symmetric_on_curve(n, 2.0, parabola(), t_end).expect("valid system")
}

/// A dense Hermitian matrix with a spread spectrum, deterministic in `dim`.
pub fn hermitian_fixture(dim: usize) -> CMatrix {
    let mut a = CMatrix::from_fn(dim, dim, |i, j| {
        let (x, y) = (i as f64, j as f64);
        C64::new((0.3 * x + 0.7 * y).sin(), (0.5 * x - 0.2 * y).cos())
    });
    for i in 0..dim {
        for j in 0..i {
            let z = a[(j, i)].conj();
            a[(i, j)] = z;
        }
        a[(i, i)] = C64::new(i as f64, 0.0);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_hermitian() {
        assert_eq!(hermitian_fixture(9).hermitian_defect(), 0.0);
    }
}
