//! Classification of index pairs `(n, m)` by the sign and size of the
//! frequency ratio `(|n|^s - |m|^s) / (n - m)`, and the explicit boundary of
//! the bad region for `s = 3/2`, `tau = 4`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curves::CurveSpec;
use crate::error::{Error, Result};

/// `|n|^s`, zero at `n = 0`.
///
/// Every module uses this one definition so that pairs with `|n| = |m|` give
/// an exactly vanishing difference.
#[inline]
pub fn temporal_freq(n: i64, s: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (n.unsigned_abs() as f64).powf(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairTag {
    Diagonal,
    AntiDiagonal,
    GoodPlus,
    GoodMinus,
    Bad,
}

impl PairTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PairTag::Diagonal => "diagonal",
            PairTag::AntiDiagonal => "antidiagonal",
            PairTag::GoodPlus => "good_plus",
            PairTag::GoodMinus => "good_minus",
            PairTag::Bad => "bad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairClass {
    pub n: i64,
    pub m: i64,
    pub tag: PairTag,
    /// `None` on the diagonal.
    pub ratio: Option<f64>,
    pub tau: f64,
}

/// Threshold `tau = 2 c2 T^{alpha - 1}` separating good and bad pairs.
pub fn tau_threshold(curve: &CurveSpec, t_end: f64) -> f64 {
    2.0 * curve.c2 * t_end.powf(curve.alpha - 1.0)
}

/// A ratio exactly equal to `-tau` counts as `GoodMinus`.
pub fn classify_pair(n: i64, m: i64, s: f64, tau: f64) -> PairClass {
    if n == m {
        return PairClass { n, m, tag: PairTag::Diagonal, ratio: None, tau };
    }
    let ratio = (temporal_freq(n, s) - temporal_freq(m, s)) / (n - m) as f64;
    let tag = if n == -m {
        PairTag::AntiDiagonal
    } else if ratio > 0.0 {
        PairTag::GoodPlus
    } else if ratio <= -tau {
        PairTag::GoodMinus
    } else {
        PairTag::Bad
    };
    PairClass { n, m, tag, ratio: Some(ratio), tau }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub s: f64,
    pub tau: f64,
    pub n_max: i64,
    /// Row-major over `m` descending, `n` ascending (the picture as drawn).
    pub cells: Vec<PairClass>,
}

pub fn region_grid(s: f64, tau: f64, n_max: i64) -> RegionGrid {
    let mut cells = Vec::with_capacity(((2 * n_max + 1) * (2 * n_max + 1)) as usize);
    for m in (-n_max..=n_max).rev() {
        for n in -n_max..=n_max {
            cells.push(classify_pair(n, m, s, tau));
        }
    }
    RegionGrid { s, tau, n_max, cells }
}

impl RegionGrid {
    pub fn count(&self, tag: PairTag) -> usize {
        self.cells.iter().filter(|c| c.tag == tag).count()
    }

    /// `n,m,tag,ratio` rows; the diagonal ratio is left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,tag,ratio\n");
        for c in &self.cells {
            let ratio = c.ratio.map(crate::table::fmt_real).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", c.n, c.m, c.tag.as_str(), ratio));
        }
        out
    }

    /// `n` runs horizontally, `m` vertically (upwards).
    pub fn to_svg(&self, cell_px: u32) -> String {
        let side = (2 * self.n_max + 1) as u32 * cell_px;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side}\" height=\"{side}\" viewBox=\"0 0 {side} {side}\">\n<rect width=\"{side}\" height=\"{side}\" fill=\"white\"/>\n"
        );
        for c in &self.cells {
            let colour = match c.tag {
                PairTag::GoodPlus => "red",
                PairTag::GoodMinus => "blue",
                PairTag::Bad => "gray",
                PairTag::Diagonal | PairTag::AntiDiagonal => "black",
            };
            let x = (c.n + self.n_max) as u32 * cell_px;
            let y = (self.n_max - c.m) as u32 * cell_px;
            out.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell_px}\" height=\"{cell_px}\" fill=\"{colour}\"/>\n"
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Boundary of the bad region for s = 3/2, tau = 4
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryBranch {
    /// `y < x < 0`, parameter `theta` in `(pi/6, pi/2)`.
    EllipseUV,
    /// `x < y < 0`, the mirror image of `EllipseUV`.
    EllipseVU,
    /// `x > 0 > y`, parameter `t` in `(0, 1)`.
    MixedXPos,
    /// `y > 0 > x`, parameter `t` in `(0, 1)`.
    MixedYPos,
}

impl BoundaryBranch {
    pub const ALL: [BoundaryBranch; 4] =
        [BoundaryBranch::EllipseUV, BoundaryBranch::EllipseVU, BoundaryBranch::MixedXPos, BoundaryBranch::MixedYPos];

    /// Open parameter interval.
    pub fn domain(self) -> (f64, f64) {
        match self {
            BoundaryBranch::EllipseUV | BoundaryBranch::EllipseVU => (PI / 6.0, PI / 2.0),
            BoundaryBranch::MixedXPos | BoundaryBranch::MixedYPos => (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
    /// `|x|^{3/2} - |y|^{3/2} + 4 (x - y)`, which vanishes on the boundary.
    pub residual: f64,
}

pub fn boundary_residual(x: f64, y: f64) -> f64 {
    x.abs().powf(1.5) - y.abs().powf(1.5) + 4.0 * (x - y)
}

/// The parametrisation itself, with no domain check (endpoints included).
pub fn boundary_formula(branch: BoundaryBranch, param: f64) -> (f64, f64) {
    let ellipse = |th: f64| {
        let u = (16.0f64 / 3.0).sqrt() * th.cos() - 4.0 / 3.0 * th.sin() + 4.0 / 3.0;
        let v = 8.0 / 3.0 * th.sin() + 4.0 / 3.0;
        (u, v)
    };
    let mixed = |t: f64| {
        let v = 4.0 * (t * t + 1.0) / (1.0 - t * t * t);
        (t * v, v)
    };
    match branch {
        BoundaryBranch::EllipseUV => {
            let (u, v) = ellipse(param);
            (-u * u, -v * v)
        }
        BoundaryBranch::EllipseVU => {
            let (u, v) = ellipse(param);
            (-v * v, -u * u)
        }
        BoundaryBranch::MixedXPos => {
            let (u, v) = mixed(param);
            (u * u, -v * v)
        }
        BoundaryBranch::MixedYPos => {
            let (u, v) = mixed(param);
            (-v * v, u * u)
        }
    }
}

/// Point of the bad-region boundary (`s = 3/2`, `tau = 4`); the open
/// parameter interval excludes its endpoints.
pub fn boundary_parametrization(branch: BoundaryBranch, param: f64) -> Result<BoundaryPoint> {
    let (lo, hi) = branch.domain();
    if !(param > lo && param < hi) {
        return Err(Error::OutOfDomain { param, domain: format!("({lo}, {hi})") });
    }
    let (x, y) = boundary_formula(branch, param);
    Ok(BoundaryPoint { x, y, residual: boundary_residual(x, y) })
}

/// Which branch bounds the negative-ratio sector containing `(n, m)`, if any.
pub fn branch_for(n: i64, m: i64) -> Option<BoundaryBranch> {
    if n == m || n == -m {
        return None;
    }
    let (an, am) = (n.abs(), m.abs());
    if n <= 0 && m < n {
        Some(BoundaryBranch::EllipseUV)
    } else if m <= 0 && n < m {
        Some(BoundaryBranch::EllipseVU)
    } else if n >= 0 && m < 0 && am > an {
        Some(BoundaryBranch::MixedXPos)
    } else if m >= 0 && n < 0 && an > am {
        Some(BoundaryBranch::MixedYPos)
    } else {
        None
    }
}

/// Side of the boundary on which an integer pair lies, found by casting the
/// ray from the origin (in the square-root coordinates `u = sqrt|x|`,
/// `v = sqrt|y|`) through the pair and locating its crossing with the
/// parametrised branch. Returns `(inside, distance_to_crossing)`.
pub fn boundary_side(n: i64, m: i64) -> Option<(bool, f64)> {
    let branch = branch_for(n, m)?;
    let (x, y) = (n as f64, m as f64);
    // (small, large) square roots in the branch's own coordinates
    let (a, b) = match branch {
        BoundaryBranch::EllipseUV | BoundaryBranch::MixedXPos => (x.abs().sqrt(), y.abs().sqrt()),
        BoundaryBranch::EllipseVU | BoundaryBranch::MixedYPos => (y.abs().sqrt(), x.abs().sqrt()),
    };
    let slope = a / b;
    let (bu, bv) = match branch {
        BoundaryBranch::MixedXPos | BoundaryBranch::MixedYPos => {
            // t = u / v directly; t = 0 is the closure point of the branch.
            let (px, py) = boundary_formula(BoundaryBranch::MixedXPos, slope);
            (px.abs().sqrt(), py.abs().sqrt())
        }
        BoundaryBranch::EllipseUV | BoundaryBranch::EllipseVU => {
            // u/v decreases from 1 at theta = pi/6 to 0 at theta = pi/2.
            let ratio = |th: f64| {
                let (px, py) = boundary_formula(BoundaryBranch::EllipseUV, th);
                px.abs().sqrt() / py.abs().sqrt()
            };
            let (mut lo, mut hi) = (PI / 6.0, PI / 2.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if ratio(mid) > slope {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (px, py) = boundary_formula(BoundaryBranch::EllipseUV, 0.5 * (lo + hi));
            (px.abs().sqrt(), py.abs().sqrt())
        }
    };
    let inside = b < bv;
    let dist = ((a * a - bu * bu).powi(2) + (b * b - bv * bv).powi(2)).sqrt();
    Some((inside, dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_pairs() {
        assert_eq!(classify_pair(2, 1, 1.5, 4.0).tag, PairTag::GoodPlus);
        let bad = classify_pair(1, -2, 1.5, 4.0);
        assert_eq!(bad.tag, PairTag::Bad);
        assert!((bad.ratio.unwrap() + (8f64.sqrt() - 1.0) / 3.0).abs() < 1e-12);
        let gm = classify_pair(1, -100, 1.5, 4.0);
        assert_eq!(gm.tag, PairTag::GoodMinus);
        assert!((gm.ratio.unwrap() + 999.0 / 101.0).abs() < 1e-12);
        assert_eq!(classify_pair(3, 3, 2.0, 1.0).tag, PairTag::Diagonal);
        assert_eq!(classify_pair(3, -3, 2.0, 1.0).tag, PairTag::AntiDiagonal);
    }

    #[test]
    fn ratio_equal_to_minus_tau_is_good_minus() {
        // (0, -16) sits on the boundary: ratio = -16^{3/2} / 16 = -4
        let r = classify_pair(0, -16, 1.5, 4.0).ratio.unwrap();
        assert!((r + 4.0).abs() < 1e-12);
        assert_eq!(classify_pair(0, -16, 1.5, -r).tag, PairTag::GoodMinus);
        assert_eq!(classify_pair(0, -16, 1.5, -r * (1.0 + 1e-12)).tag, PairTag::Bad);
    }

    #[test]
    fn theta_half_pi_lands_on_the_axis() {
        let (x, y) = boundary_formula(BoundaryBranch::EllipseUV, PI / 2.0);
        assert!(x.abs() < 1e-12 && (y + 16.0).abs() < 1e-12);
        assert!(matches!(
            boundary_parametrization(BoundaryBranch::EllipseUV, PI / 2.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn region_svg_and_csv_shapes() {
        let g = region_grid(1.5, 4.0, 5);
        assert_eq!(g.cells.len(), 121);
        assert_eq!(g.to_csv().lines().count(), 122);
        let svg = g.to_svg(4);
        assert_eq!(svg.matches("fill=\"gray\"").count(), g.count(PairTag::Bad));
    }
}
