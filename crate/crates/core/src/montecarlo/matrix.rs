use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = Matrix::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &Matrix) -> Complex64 {
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        acc
    }

    pub fn add_scaled(&mut self, other: &Matrix, k: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * k;
        }
    }

    pub fn scale(&mut self, k: f64) {
        for a in &mut self.data {
            *a *= k;
        }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    /// Largest `|M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let d = self.hermiticity_defect();
        if d > tol {
            return Err(Error::NotHermitian(d));
        }
        Ok(())
    }

    /// Removes the trace part, `M - (tr M / n) I`.
    pub fn project_traceless(&mut self) {
        let shift = self.trace() / self.n as f64;
        for i in 0..self.n {
            self.data[i * self.n + i] -= shift;
        }
    }

    /// Gaussian Hermitian matrix with density `exp(-tr H^2 / 2)`: real
    /// diagonal entries of variance 1, off-diagonal real and imaginary parts
    /// of variance 1/2. Hermitian by construction.
    pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
        let mut m = Matrix::zeros(n);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n {
            let d: f64 = rng.sample(StandardNormal);
            m.set(i, i, Complex64::new(d, 0.0));
            for j in i + 1..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let z = Complex64::new(re * h, im * h);
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (n, m) = (self.n, other.n);
        let mut out = Matrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    /// Squared Frobenius norm, equal to `tr(M^2)` for Hermitian `M`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}
