//! Small dense complex matrices and a Cholesky solver for Hermitian
//! positive-definite systems, sized for per-frequency `I × I` problems.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n, "CMatrix::from_rows: wrong element count");
        Self { n, data }
    }

    /// `scale · v vᴴ`.
    pub fn outer(v: &[Complex64], scale: f64) -> Self {
        let mut m = Self::zeros(v.len());
        m.add_outer(v, scale);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// `self += scale · v vᴴ`.
    pub fn add_outer(&mut self, v: &[Complex64], scale: f64) {
        debug_assert_eq!(v.len(), self.n);
        for i in 0..self.n {
            let vi = v[i] * scale;
            let row = &mut self.data[i * self.n..(i + 1) * self.n];
            for (r, vj) in row.iter_mut().zip(v) {
                *r += vi * vj.conj();
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `self + δ I`.
    pub fn with_diagonal(&self, delta: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] += delta;
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular factor `L` with `A = L Lᴴ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    /// Factorises a Hermitian matrix, reading only its lower triangle.
    /// Returns `None` when a pivot is not safely positive.
    pub fn new(a: &CMatrix) -> Option<Self> {
        let n = a.dim();
        let max_diag = (0..n).map(|i| a[(i, i)].re.abs()).fold(0.0, f64::max);
        let floor = max_diag * n as f64 * f64::EPSILON;
        let mut l = CMatrix::zeros(n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d.is_finite() && d > floor) {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(Self { l })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.dim();
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * y[k];
            }
            y[i] = s / l[(i, i)].re;
        }
        y
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let n = b.dim();
        let mut out = CMatrix::zeros(n);
        for j in 0..n {
            let x = self.solve(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hpd() -> CMatrix {
        let mut m = CMatrix::identity(3).scaled(0.5);
        m.add_outer(&[c(1.0, 0.5), c(-0.2, 1.0), c(0.3, -0.7)], 2.0);
        m.add_outer(&[c(0.1, 0.0), c(0.9, 0.2), c(-1.0, 0.4)], 1.0);
        m
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = hpd();
        let chol = Cholesky::new(&a).unwrap();
        let b = vec![c(1.0, -2.0), c(0.5, 0.5), c(-3.0, 0.1)];
        let x = chol.solve(&b);
        let ax = a.matvec(&x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn solve_matrix_gives_inverse() {
        let a = hpd();
        let inv = Cholesky::new(&a)
            .unwrap()
            .solve_matrix(&CMatrix::identity(3));
        let p = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p[(i, j)] - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_singular_and_indefinite() {
        let rank1 = CMatrix::outer(&[c(1.0, 0.0), c(0.0, 1.0)], 1.0);
        assert!(Cholesky::new(&rank1).is_none());
        assert!(Cholesky::new(&CMatrix::zeros(2)).is_none());
        let mut indefinite = CMatrix::identity(2);
        indefinite[(1, 1)] = c(-1.0, 0.0);
        assert!(Cholesky::new(&indefinite).is_none());
    }

    #[test]
    fn outer_product_is_hermitian() {
        let m = hpd();
        assert!(m.hermitian_defect() < 1e-15);
        assert!((m.trace().im).abs() < 1e-15);
    }
}
