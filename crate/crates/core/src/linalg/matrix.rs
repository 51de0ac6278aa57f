//! Dense square complex matrices.
//!
//! Storage is row-major: `data[i * dim + j]` holds entry `(i, j)`. Real inputs
//! are carried as complex numbers with zero imaginary part.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LinalgError;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// From this dimension on, products go through the cache-blocked kernel of
/// `matrixmultiply`; below it the plain loops win.
const BLOCKED_MIN_DIM: usize = 16;

fn blocked_product(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.dim;
    let mut out = vec![ZERO; n * n];
    let ns = n as isize;
    // SAFETY: Complex64 is repr(C) { re, im }, layout-identical to [f64; 2];
    // all three buffers hold n*n elements with row stride n and unit column stride.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            n,
            n,
            n,
            [1.0, 0.0],
            a.data.as_ptr().cast(),
            ns,
            1,
            b.data.as_ptr().cast(),
            ns,
            1,
            [0.0, 0.0],
            out.as_mut_ptr().cast(),
            ns,
            1,
        );
    }
    Matrix { dim: n, data: out }
}

/// A dense `dim × dim` complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn scalar(value: Complex64) -> Self {
        Self {
            dim: 1,
            data: vec![value],
        }
    }

    /// Builds a matrix from row-major entries. Fails on a length that is not a
    /// positive perfect square or on non-finite entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(LinalgError::DataLength {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// The rank-one matrix `v v*`.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        Self::from_fn(dim, |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `(1/dim) · trace`, the finite-dimensional tracial state.
    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / self.dim as f64
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * alpha).collect(),
        }
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * alpha).collect(),
        }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: Complex64, other: &Matrix) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        if n >= BLOCKED_MIN_DIM {
            return blocked_product(self, rhs);
        }
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Matrix { dim: n, data: out }
    }

    /// `self* · rhs` without materializing the adjoint.
    pub fn adjoint_matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        if n >= BLOCKED_MIN_DIM {
            return blocked_product(&self.adjoint(), rhs);
        }
        let mut out = vec![ZERO; n * n];
        for k in 0..n {
            let a_row = &self.data[k * n..(k + 1) * n];
            let b_row = &rhs.data[k * n..(k + 1) * n];
            for i in 0..n {
                let a = a_row[i].conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out[i * n..(i + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Matrix { dim: n, data: out }
    }

    /// `self · rhs*` without materializing the adjoint.
    pub fn matmul_adjoint(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        if n >= BLOCKED_MIN_DIM {
            return blocked_product(self, &rhs.adjoint());
        }
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let a_row = &self.data[i * n..(i + 1) * n];
            for j in 0..n {
                let b_row = &rhs.data[j * n..(j + 1) * n];
                out[i * n + j] = a_row
                    .iter()
                    .zip(b_row)
                    .fold(ZERO, |acc, (&a, &b)| acc + a * b.conj());
            }
        }
        Matrix { dim: n, data: out }
    }

    /// `x* · self · x` for a matrix `x`: the congruence used by every sandwich sum.
    pub fn congruence_by(&self, x: &Matrix) -> Matrix {
        x.adjoint_matmul(&self.matmul(x))
    }

    /// `x · self · x*`.
    pub fn conjugate_by(&self, x: &Matrix) -> Matrix {
        x.matmul(self).matmul_adjoint(x)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(ZERO, |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − self*`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Matrix {
        let n = self.dim;
        Self::from_fn(n, |i, j| {
            (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&Matrix> for Matrix {
    fn sub_assign(&mut self, rhs: &Matrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}
