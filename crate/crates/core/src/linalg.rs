//! Small dense complex linear algebra: Hermitian Jacobi eigensolver, LU, rank.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `v^H A v`, real part (imaginary part vanishes for Hermitian `A`).
    pub fn rayleigh(&self, v: &[C64]) -> f64 {
        let av = self.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` of this matrix is the unit eigenvector of `values[k]`.
    pub vectors: CMatrix,
    pub sweeps: usize,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Cyclic Jacobi for a Hermitian matrix; only the upper triangle is read.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary,
/// then applies the real symmetric Jacobi rotation.
pub fn hermitian_eigen(a: &CMatrix) -> HermitianEigen {
    assert!(a.is_square(), "eigen decomposition needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in 0..i {
            m[(i, j)] = m[(j, i)].conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    for sweep in 0..100 {
        sweeps = sweep + 1;
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            sweeps = sweep;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = D P with D = diag(1, conj(phase)) on (p, q) and P the real rotation.
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * jpp + akq * jqp;
                    m[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    m[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors, sweeps }
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &CMatrix) -> C64 {
    assert!(a.is_square(), "determinant needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm())).unwrap();
        if m[(piv, col)].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != col {
            for k in 0..n {
                m.data.swap(piv * n + k, col * n + k);
            }
            det = -det;
        }
        let d = m[(col, col)];
        det *= d;
        for r in (col + 1)..n {
            let f = m[(r, col)] / d;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let sub = f * m[(col, k)];
                m[(r, k)] -= sub;
            }
        }
    }
    det
}

/// Numerical rank by Gaussian elimination with full pivoting; pivots below
/// `rel_tol * max|a_ij|` count as zero.
pub fn rank(a: &CMatrix, rel_tol: f64) -> usize {
    let mut m = a.clone();
    let (rows, cols) = (m.rows, m.cols);
    let cutoff = rel_tol * m.max_abs();
    let mut r = 0;
    let mut col_perm: Vec<usize> = (0..cols).collect();
    while r < rows.min(cols) {
        let mut best = (r, r, 0.0);
        for i in r..rows {
            for j in r..cols {
                let v = m[(i, col_perm[j])].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= cutoff || best.2 == 0.0 {
            break;
        }
        let (pi, pj, _) = best;
        for k in 0..cols {
            m.data.swap(pi * cols + k, r * cols + k);
        }
        col_perm.swap(r, pj);
        let pc = col_perm[r];
        let d = m[(r, pc)];
        for i in (r + 1)..rows {
            let f = m[(i, pc)] / d;
            for &k in &col_perm[r..] {
                let sub = f * m[(r, k)];
                m[(i, k)] -= sub;
            }
        }
        r += 1;
    }
    r
}

/// Real roots of a monic cubic `x^3 + b x^2 + c x + d` with three real roots
/// (the characteristic polynomial of a 3×3 Hermitian matrix), ascending.
pub fn real_cubic_roots(b: f64, c: f64, d: f64) -> [f64; 3] {
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let mut roots = if p.abs() < 1e-300 {
        let r = (-q).cbrt();
        [r, r, r]
    } else {
        let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
        let arg = if m == 0.0 { 0.0 } else { (3.0 * q / (p * m)).clamp(-1.0, 1.0) };
        let theta = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        [m * theta.cos(), m * (theta - tau).cos(), m * (theta + tau).cos()]
    };
    for r in &mut roots {
        *r -= shift;
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Eigenvalues of a Hermitian matrix of dimension at most 3 from its
/// characteristic polynomial.
pub fn charpoly_eigenvalues(a: &CMatrix) -> Option<Vec<f64>> {
    match a.rows {
        1 => Some(vec![a[(0, 0)].re]),
        2 => {
            let (p, q) = (a[(0, 0)].re, a[(1, 1)].re);
            let off = a[(0, 1)].norm_sqr();
            let mean = 0.5 * (p + q);
            let rad = (0.25 * (p - q) * (p - q) + off).sqrt();
            Some(vec![mean - rad, mean + rad])
        }
        3 => {
            let (a11, a22, a33) = (a[(0, 0)].re, a[(1, 1)].re, a[(2, 2)].re);
            let (a12, a13, a23) = (a[(0, 1)], a[(0, 2)], a[(1, 2)]);
            let tr = a11 + a22 + a33;
            let minors = a11 * a22 + a11 * a33 + a22 * a33 - a12.norm_sqr() - a13.norm_sqr() - a23.norm_sqr();
            let det = determinant(a).re;
            Some(real_cubic_roots(-tr, minors, -det).to_vec())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = C64::new(rng.gen_range(-2.0..2.0), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        a
    }

    #[test]
    fn jacobi_reconstructs_random_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 3, 7, 20] {
            let a = random_hermitian(n, &mut rng);
            let eig = hermitian_eigen(&a);
            for k in 0..n {
                let v = eig.vector(k);
                let av = a.mul_vec(&v);
                let resid: f64 = av.iter().zip(&v).map(|(x, y)| (x - y * eig.values[k]).norm_sqr()).sum::<f64>().sqrt();
                assert!(resid < 1e-12, "n={n} k={k} resid={resid}");
            }
            let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
            let sum: f64 = eig.values.iter().sum();
            assert!((trace - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_agrees_with_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            for _ in 0..50 {
                let a = random_hermitian(n, &mut rng);
                let eig = hermitian_eigen(&a);
                let cp = charpoly_eigenvalues(&a).unwrap();
                for (x, y) in eig.values.iter().zip(&cp) {
                    assert!((x - y).abs() < 1e-9, "{:?} vs {:?}", eig.values, cp);
                }
            }
        }
    }

    #[test]
    fn determinant_and_rank_of_known_matrices() {
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, 0.0));
        assert!(determinant(&a).norm() < 1e-12);
        assert_eq!(rank(&a, 1e-10), 2);
        let b = CMatrix::from_fn(2, 2, |i, j| if i == j { C64::new(0.0, 2.0) } else { C64::new(1.0, 0.0) });
        // (2i)(2i) - 1 = -5
        assert!((determinant(&b) - C64::new(-5.0, 0.0)).norm() < 1e-14);
        assert_eq!(rank(&b, 1e-10), 2);
    }
}
