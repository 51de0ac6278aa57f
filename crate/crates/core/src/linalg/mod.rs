//! Dense complex linear algebra: the matrix type, norms, Hermitian
//! eigenvalues, normalized trace and random-matrix sampling.

mod eigen;
mod matrix;
mod random;

pub use eigen::{
    eigh, eigvalsh, extreme_eigenvalues, tridiagonal_eigenvalue, tridiagonalize, HermitianEigen,
};
pub use matrix::{Matrix, ONE, ZERO};
pub use random::{complex_gaussian, ginibre, gue, haar_unitary, substream, RngStream};

use num_complex::Complex64;

/// Absolute tolerance on the largest entry of `M − M*` for a matrix to count
/// as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default relative tolerance for [`spectral_norm`].
pub const SPECTRAL_REL_TOL: f64 = 1e-12;

/// Power iteration cap for [`spectral_norm`].
pub const POWER_MAX_ITERATIONS: usize = 10_000;

/// Above this dimension [`spectral_norm`] switches from the dense
/// eigenvalue route to power iteration.
pub const DENSE_NORM_MAX_DIM: usize = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
    #[error("data length mismatch: expected {expected}, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: max |M - M*| entry is {residual:e} (tolerance {tol:e})")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("dimension {dim} is not divisible by 4")]
    DimNotDivisibleByFour { dim: usize },
    #[error("moment parameter t = {t} must lie in (0, sqrt(2)]")]
    MomentParameter { t: f64 },
    #[error("relative tolerance must be positive, got {0}")]
    Tolerance(f64),
}

/// Outcome of an operator-norm computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResult {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest singular value of `m`.
///
/// For `dim ≤ 32` this is `sqrt(λ_max(M*M))` from the dense Hermitian
/// eigenvalue routine and always reports convergence. Larger matrices use
/// power iteration on `M*M` with the given relative tolerance; if it stalls
/// after [`POWER_MAX_ITERATIONS`] the last estimate is returned with
/// `converged = false`.
pub fn spectral_norm(m: &Matrix, rel_tol: f64) -> Result<SpectralResult, LinalgError> {
    if !(rel_tol > 0.0) {
        return Err(LinalgError::Tolerance(rel_tol));
    }
    let gram = m.adjoint_matmul(m);
    if m.dim() <= DENSE_NORM_MAX_DIM {
        let (_, top) = extreme_eigenvalues(&gram);
        return Ok(SpectralResult {
            value: top.max(0.0).sqrt(),
            iterations: 0,
            converged: true,
        });
    }
    Ok(power_iteration(&gram, rel_tol, POWER_MAX_ITERATIONS))
}

fn power_iteration(gram: &Matrix, rel_tol: f64, max_iterations: usize) -> SpectralResult {
    let n = gram.dim();
    // Deterministic start with no symmetry that could make it orthogonal to
    // the top eigenvector of a structured matrix.
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.01 * i as f64, 0.003 * (i as f64).sqrt()))
        .collect();
    normalize(&mut v);
    let mut estimate = 0.0;
    for it in 1..=max_iterations {
        let mut w = gram.matvec(&v);
        let rayleigh: f64 = v
            .iter()
            .zip(&w)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>()
            .max(0.0);
        let norm = normalize(&mut w);
        if norm == 0.0 {
            return SpectralResult {
                value: 0.0,
                iterations: it,
                converged: true,
            };
        }
        v = w;
        if it > 1 && (rayleigh - estimate).abs() <= rel_tol * rayleigh {
            return SpectralResult {
                value: rayleigh.sqrt(),
                iterations: it,
                converged: true,
            };
        }
        estimate = rayleigh;
    }
    SpectralResult {
        value: estimate.sqrt(),
        iterations: max_iterations,
        converged: false,
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

/// Operator norm of a Hermitian matrix, `max |λ|`, through the dense
/// eigenvalue routine at any dimension. Only the Hermitian part is read.
pub fn hermitian_norm(m: &Matrix) -> f64 {
    let (lo, hi) = extreme_eigenvalues(m);
    lo.abs().max(hi.abs())
}

/// Smallest eigenvalue of `(M + M*)/2`, after checking that `M` is Hermitian
/// to [`HERMITIAN_TOL`].
pub fn min_eig_hermitian(m: &Matrix) -> Result<f64, LinalgError> {
    let residual = m.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian {
            residual,
            tol: HERMITIAN_TOL,
        });
    }
    Ok(extreme_eigenvalues(m).0)
}

/// `(1/dim) · trace(M)`.
pub fn normalized_trace(m: &Matrix) -> Complex64 {
    m.normalized_trace()
}

/// Diagonal Hermitian matrix with spectrum `{+t, −t, +s, −s}` in equal
/// multiplicity, `s = sqrt(2 − t²)`, so that `τ(a) = 0` and `τ(a²) = 1`.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub matrix: Matrix,
    pub t: f64,
    pub s: f64,
    /// Set when `t = 1`, where `a² = I`.
    pub degenerate: bool,
}

pub fn hermitian_with_moments(dim: usize, t: f64) -> Result<MomentMatrix, LinalgError> {
    if dim == 0 || !dim.is_multiple_of(4) {
        return Err(LinalgError::DimNotDivisibleByFour { dim });
    }
    if !(t > 0.0) || t * t > 2.0 {
        return Err(LinalgError::MomentParameter { t });
    }
    let s = (2.0 - t * t).sqrt();
    let q = dim / 4;
    let mut diag = Vec::with_capacity(dim);
    for value in [t, -t, s, -s] {
        diag.extend(std::iter::repeat_n(value, q));
    }
    Ok(MomentMatrix {
        matrix: Matrix::from_real_diagonal(&diag),
        t,
        s,
        degenerate: t == 1.0,
    })
}
