//! Invariants checked over random inputs.

use std::f64::consts::PI;

use curved_ingham::classify::{classify_pair, PairTag};
use curved_ingham::curves::{mu_hat, CurveSpec, MeasureKind, MeasureSpec};
use curved_ingham::linalg::C64;
use curved_ingham::oscint::oscillatory_integral;
use curved_ingham::riesz::{gram_matrix, ExpSystem};
use curved_ingham::rigidity::{three_point_test, vandermonde_rank};
use curved_ingham::sums::tail_sum;
use curved_ingham::verify::bessel_j0;
use proptest::prelude::*;

fn arc() -> MeasureKind {
    MeasureKind::CircleArc { radius: 1.0, start: 0.3, sweep: 1.2 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_bounded_and_conjugate_symmetric(a in -40.0..40.0f64, b in -40.0..40.0f64) {
        for kind in [arc(), MeasureKind::ProductNuDelta { delta: 0.7 }] {
            let mu = MeasureSpec::new(kind, 4096).unwrap();
            let z = mu_hat(&mu, [a, b]);
            prop_assert!(z.norm() <= 1.0 + 1e-12);
            let w = mu_hat(&mu, [-a, -b]);
            prop_assert!((z - w.conj()).norm() <= 1e-12);
        }
    }

    #[test]
    fn transform_stable_under_resolution_doubling(a in -20.0..20.0f64, b in -20.0..20.0f64) {
        let coarse = MeasureSpec::new(arc(), MeasureSpec::resolution_for(&arc(), 40.0)).unwrap();
        let fine = MeasureSpec::new(arc(), 2 * coarse.nodes.len()).unwrap();
        prop_assert!((mu_hat(&coarse, [a, b]) - mu_hat(&fine, [a, b])).norm() <= 1e-8);
    }

    #[test]
    fn circle_transform_is_bessel(r in 0.0..25.0f64, th in 0.0..(2.0 * PI)) {
        let mu = MeasureSpec::new(MeasureKind::ArcLengthOnCircle { radius: 1.0 }, 1024).unwrap();
        let z = mu_hat(&mu, [r * th.cos(), r * th.sin()]);
        prop_assert!((z.re - bessel_j0(2.0 * PI * r)).abs() <= 1e-8);
        prop_assert!(z.im.abs() <= 1e-8);
    }

    #[test]
    fn classification_symmetric(n in -500i64..500, m in -500i64..500, s in 1.05..4.0f64) {
        let a = classify_pair(n, m, s, 4.0).tag;
        prop_assert_eq!(a, classify_pair(m, n, s, 4.0).tag);
        // every pair gets exactly the tag its ratio dictates
        let expected = match (n == m, n == -m) {
            (true, _) => PairTag::Diagonal,
            (_, true) => PairTag::AntiDiagonal,
            _ => {
                let r = classify_pair(n, m, s, 4.0).ratio.unwrap();
                if r > 0.0 { PairTag::GoodPlus } else if r <= -4.0 { PairTag::GoodMinus } else { PairTag::Bad }
            }
        };
        prop_assert_eq!(a, expected);
    }

    #[test]
    fn integral_swaps_to_conjugate(n in -30i64..30, m in -30i64..30, s in 1.2..3.0f64, t in 0.1..2.0f64) {
        let curve = CurveSpec::monomial(2.0).unwrap();
        let a = oscillatory_integral(n, m, s, &curve, t, 1e-10).unwrap().value;
        let b = oscillatory_integral(m, n, s, &curve, t, 1e-10).unwrap().value;
        prop_assert!((a - b.conj()).norm() <= 1e-9);
    }

    #[test]
    fn tail_decreases_in_start(m in -200i64..200, n in 0i64..2000) {
        let a = tail_sum(0.0, 0.5, 2.5, m, n, None).unwrap().value;
        let b = tail_sum(0.0, 0.5, 2.5, m, n + 1, None).unwrap().value;
        prop_assert!(b <= a);
    }

    #[test]
    fn three_point_invariant_under_2pi(t in proptest::array::uniform3(-3.0..3.0f64),
                                       x in proptest::array::uniform3(-3.0..3.0f64),
                                       k in -3i32..3) {
        let p = [[t[0], x[0]], [t[1], x[1]], [t[2], x[2]]];
        let shift = 2.0 * PI * k as f64;
        let q = [[t[0] + shift, x[0]], [t[1], x[1] - shift], [t[2], x[2]]];
        match (three_point_test(&p, None), three_point_test(&q, None)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.rank, b.rank),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "admissibility changed under a 2 pi shift"),
        }
    }

    #[test]
    fn vandermonde_lu_agrees(seed in proptest::collection::vec(-0.3..0.3f64, 7)) {
        let h = 6.0 / 7.0;
        let l: Vec<f64> = seed.iter().enumerate().map(|(j, e)| -3.0 + h * (j as f64 + 0.5) + e * h).collect();
        prop_assume!(l.iter().all(|x| x.abs() > 0.1 * h));
        let r = vandermonde_rank(&l).unwrap();
        prop_assert!((r.det_abs - r.det_abs_lu).abs() <= 1e-10 * r.det_abs);
    }
}

#[test]
fn gram_is_hermitian_with_unit_diagonal() {
    let curve = CurveSpec::monomial(2.0).unwrap();
    let g = gram_matrix(&ExpSystem::symmetric_on_curve(6, 2.0, curve, 1.5).unwrap(), 1e-12).unwrap();
    let e = &g.entries;
    for i in 0..e.rows {
        assert!((e[(i, i)] - C64::new(1.5, 0.0)).norm() < 1e-12);
        for j in 0..e.cols {
            assert!((e[(i, j)] - e[(j, i)].conj()).norm() < 1e-12);
        }
    }
}

#[test]
fn tail_horizon_halving_within_bound() {
    for (g, d, s) in [(0.0, 0.5, 2.5), (0.25, 0.25, 5.0), (0.0, 1.0, 2.0)] {
        let full = tail_sum(g, d, s, 50, 1000, Some(1_000_000)).unwrap();
        let half = tail_sum(g, d, s, 50, 1000, Some(500_000)).unwrap();
        let bound = full.remainder_bound + half.remainder_bound;
        assert!((full.value - half.value).abs() <= bound.max(1e-14 * full.value), "{g} {d} {s}");
    }
}
