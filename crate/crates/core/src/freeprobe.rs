//! Random-matrix model of a free family `a_j = a·u_j`.
//!
//! `a` is Hermitian with `τ(a) = 0`, `τ(a²) = 1`; the `u_j` are independent
//! Haar unitaries with `|τ(u_j)|` forced small by rejection. At large
//! dimension the family is approximately free, and the degree-3 means in the
//! ordering `a_{j1}a_{j2}a_{j3}a_{j3}*a_{j2}*a_{j1}*` have equal traces while
//! the with-replacement mean fails to dominate the without-replacement one.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{
    haar_unitary, hermitian_norm, hermitian_with_moments, min_eig_hermitian, substream,
    LinalgError, Matrix, RngStream,
};
use crate::symsum::{OperatorFamily, Side, SymError};

/// Acceptance threshold on `|τ(u_j)|`.
pub const TRACE_REJECT_TOL: f64 = 1e-3;
/// Haar draws allowed per unitary before giving up.
pub const MAX_REDRAWS: usize = 1_000_000;
/// Unitarity tolerance on `max |U*U − I|`.
pub const UNITARY_TOL: f64 = 1e-12;
/// Allowed `|τ(a)|` and `|τ(a²) − 1|` for a model family.
pub const MOMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FreeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("need at least {need} unitaries, got {got}")]
    TooFewUnitaries { need: usize, got: usize },
    #[error("a is not Hermitian: residual {0:e}")]
    NotHermitian(f64),
    #[error("unitary {index} fails U*U = I by {residual:e}")]
    NotUnitary { index: usize, residual: f64 },
    #[error("dimension mismatch between a ({a}) and unitary {index} ({u})")]
    DimensionMismatch { a: usize, index: usize, u: usize },
    #[error("no Haar draw with |tau(u)| <= {TRACE_REJECT_TOL} after {MAX_REDRAWS} attempts")]
    RejectionExhausted,
}

/// `a` together with unitaries `u_j` and the products `a_j = a·u_j`.
#[derive(Debug, Clone)]
pub struct FreeFamily {
    a: Matrix,
    us: Vec<Matrix>,
    ajs: Vec<Matrix>,
    degenerate: bool,
    draws: Vec<usize>,
}

impl FreeFamily {
    /// Assembles a family from a Hermitian `a` and unitaries. Moment
    /// conditions on `a` are not enforced here; see [`FreeFamily::moment_residuals`].
    pub fn from_parts(a: Matrix, us: Vec<Matrix>) -> Result<Self, FreeError> {
        let h = a.hermitian_residual();
        if h > crate::linalg::HERMITIAN_TOL {
            return Err(FreeError::NotHermitian(h));
        }
        let dim = a.dim();
        for (index, u) in us.iter().enumerate() {
            if u.dim() != dim {
                return Err(FreeError::DimensionMismatch {
                    a: dim,
                    index,
                    u: u.dim(),
                });
            }
            let residual = u.adjoint_matmul(u).max_abs_diff(&Matrix::identity(dim));
            if residual > UNITARY_TOL {
                return Err(FreeError::NotUnitary { index, residual });
            }
        }
        let ajs = us.iter().map(|u| a.matmul(u)).collect();
        let a2 = a.matmul(&a);
        let degenerate = a2.max_abs_diff(&Matrix::identity(dim)) <= 1e-12;
        let draws = vec![1; us.len()];
        Ok(Self {
            a,
            us,
            ajs,
            degenerate,
            draws,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn n(&self) -> usize {
        self.us.len()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn us(&self) -> &[Matrix] {
        &self.us
    }

    pub fn ajs(&self) -> &[Matrix] {
        &self.ajs
    }

    /// Set when `a² = I`, where both means collapse to the identity.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Haar draws spent on each `u_j` by the rejection step.
    pub fn draws(&self) -> &[usize] {
        &self.draws
    }

    /// `(|τ(a)|, |τ(a²) − 1|)`.
    pub fn moment_residuals(&self) -> (f64, f64) {
        let t1 = self.a.normalized_trace().norm();
        let t2 = (self.a.matmul(&self.a).normalized_trace() - 1.0).norm();
        (t1, t2)
    }

    /// The `a_j` read as a right-normalized operator family: its degree-3
    /// means coincide with [`ewo3`] and [`ewr3`].
    pub fn as_operator_family(&self) -> Result<OperatorFamily, SymError> {
        OperatorFamily::with_side(self.ajs.clone(), Side::Right)
    }
}

fn draw_traceless_unitary(dim: usize, rng: &mut RngStream) -> Result<(Matrix, usize), FreeError> {
    for attempt in 1..=MAX_REDRAWS {
        let u = haar_unitary(dim, rng);
        if u.normalized_trace().norm() <= TRACE_REJECT_TOL {
            return Ok((u, attempt));
        }
    }
    Err(FreeError::RejectionExhausted)
}

/// Builds the model family: `a = V diag(±t, ±s) V*` with `V` Haar and
/// `s = sqrt(2 − t²)`, and `n` Haar unitaries redrawn until
/// `|τ(u_j)| ≤ 1e−3`.
pub fn make_free_family(
    dim: usize,
    n: usize,
    t: f64,
    rng: &mut RngStream,
) -> Result<FreeFamily, FreeError> {
    if n < 2 {
        return Err(FreeError::TooFewUnitaries { need: 2, got: n });
    }
    let base = hermitian_with_moments(dim, t)?;
    let v = haar_unitary(dim, rng);
    let a = base.matrix.conjugate_by(&v).hermitian_part();
    let mut us = Vec::with_capacity(n);
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        let (u, k) = draw_traceless_unitary(dim, rng)?;
        us.push(u);
        draws.push(k);
    }
    let mut fam = FreeFamily::from_parts(a, us)?;
    fam.degenerate = base.degenerate;
    fam.draws = draws;
    Ok(fam)
}

fn grams(fam: &FreeFamily) -> Vec<Matrix> {
    fam.ajs.iter().map(|x| x.matmul_adjoint(x)).collect()
}

/// With-replacement degree-3 mean
/// `n^{−3} Σ_{j,k,l} a_j a_k a_l a_l* a_k* a_j*`.
pub fn ewr3(fam: &FreeFamily) -> Matrix {
    let n = fam.n() as f64;
    let mut x = Matrix::zeros(fam.dim());
    for g in grams(fam) {
        x += &g;
    }
    x = x.scale_real(1.0 / n);
    for _ in 0..2 {
        let mut next = Matrix::zeros(fam.dim());
        for aj in &fam.ajs {
            next += &x.conjugate_by(aj);
        }
        x = next.scale_real(1.0 / n);
    }
    x
}

/// Without-replacement degree-3 mean over distinct `(j, k, l)`.
pub fn ewo3(fam: &FreeFamily) -> Result<Matrix, FreeError> {
    let n = fam.n();
    if n < 3 {
        return Err(FreeError::TooFewUnitaries { need: 3, got: n });
    }
    let dim = fam.dim();
    let g = grams(fam);
    let mut total = Matrix::zeros(dim);
    for x in &g {
        total += x;
    }
    let mut acc = Matrix::zeros(dim);
    for j in 0..n {
        let mut inner = Matrix::zeros(dim);
        for k in (0..n).filter(|&k| k != j) {
            let mut rest = total.clone();
            rest -= &g[j];
            rest -= &g[k];
            inner += &rest.conjugate_by(&fam.ajs[k]);
        }
        acc += &inner.conjugate_by(&fam.ajs[j]);
    }
    Ok(acc.scale_real(1.0 / (n * (n - 1) * (n - 2)) as f64))
}

/// Closed form of `E_wo,3 − E_wr,3` with `D = I − a²`:
/// `[1/n² − 1/(n(n−1))] Σ_{j,k} a_j a_k D a_k* a_j* + 1/(n(n−1)) Σ_j a_j a_j D a_j* a_j*`.
/// Valid whenever `a_j a_j* = a²`.
pub fn difference_closed_form(fam: &FreeFamily) -> Matrix {
    let n = fam.n() as f64;
    let dim = fam.dim();
    let mut d = Matrix::identity(dim);
    d -= &fam.a.matmul(&fam.a);
    let mut inner = Matrix::zeros(dim);
    for ak in &fam.ajs {
        inner += &d.conjugate_by(ak);
    }
    let mut pairs = Matrix::zeros(dim);
    let mut diag = Matrix::zeros(dim);
    for aj in &fam.ajs {
        pairs += &inner.conjugate_by(aj);
        diag += &d.conjugate_by(aj).conjugate_by(aj);
    }
    let mut out = pairs.scale_real(1.0 / (n * n) - 1.0 / (n * (n - 1.0)));
    out += &diag.scale_real(1.0 / (n * (n - 1.0)));
    out
}

/// Operator norm of `(E_wo,3 − E_wr,3)` minus its closed form. The identity
/// is exact algebra, so this is rounding-level for any family.
pub fn difference_identity_residual(fam: &FreeFamily) -> Result<f64, FreeError> {
    let mut diff = ewo3(fam)?;
    diff -= &ewr3(fam);
    diff -= &difference_closed_form(fam);
    Ok(hermitian_norm(&diff))
}

/// `λ_min(E_wr,3 − E_wo,3)`; negative values witness the order violation.
pub fn order_violation(fam: &FreeFamily) -> Result<f64, FreeError> {
    let mut diff = ewr3(fam);
    diff -= &ewo3(fam)?;
    Ok(min_eig_hermitian(&diff)?)
}

/// `|τ(E_wr,3) − τ(E_wo,3)|`.
pub fn trace_gap(fam: &FreeFamily) -> Result<f64, FreeError> {
    Ok((ewr3(fam).normalized_trace() - ewo3(fam)?.normalized_trace()).norm())
}

/// Largest deviation of `τ(a u_j a u_j*)` from its value for free `a`, `u_j`:
/// `τ(a)² + (τ(a²) − τ(a)²)|τ(u_j)|²`.
pub fn freeness_residual(fam: &FreeFamily) -> f64 {
    let a = &fam.a;
    let ta = a.normalized_trace();
    let ta2 = a.matmul(a).normalized_trace();
    fam.us
        .iter()
        .map(|u| {
            let mixed = a.matmul(u).matmul(a).matmul_adjoint(u).normalized_trace();
            let tu = u.normalized_trace().norm_sqr();
            let free = ta * ta + (ta2 - ta * ta) * tu;
            (mixed - free).norm()
        })
        .fold(0.0, f64::max)
}

/// One row of a seed sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub seed: u64,
    pub identity_residual: f64,
    pub lambda_min: f64,
    pub trace_gap: f64,
    pub tau_wo: f64,
    pub freeness_residual: f64,
}

/// Everything reported for one family, computing each mean once.
pub fn analyze(fam: &FreeFamily, seed: u64) -> Result<CounterexampleRow, FreeError> {
    let wo = ewo3(fam)?;
    let wr = ewr3(fam);
    let mut diff = wo.clone();
    diff -= &wr;
    diff -= &difference_closed_form(fam);
    let mut gap = wr.clone();
    gap -= &wo;
    let tau_wo: Complex64 = wo.normalized_trace();
    Ok(CounterexampleRow {
        seed,
        identity_residual: hermitian_norm(&diff),
        lambda_min: min_eig_hermitian(&gap)?,
        trace_gap: gap.normalized_trace().norm(),
        tau_wo: tau_wo.re,
        freeness_residual: freeness_residual(fam),
    })
}

/// Runs [`analyze`] on `seeds` families; family `i` is drawn from substream
/// `i` of `base_seed`. Rows come back in seed order whatever the thread count.
pub fn counterexample_sweep(
    dim: usize,
    n: usize,
    t: f64,
    seeds: usize,
    base_seed: u64,
) -> Result<Vec<CounterexampleRow>, FreeError> {
    (0..seeds as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(base_seed, i);
            let fam = make_free_family(dim, n, t, &mut rng)?;
            analyze(&fam, i)
        })
        .collect()
}
