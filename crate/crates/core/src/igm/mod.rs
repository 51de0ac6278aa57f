//! Incremental gradient method on noisy least squares.
//!
//! Data are `y_i = a_i* x_* + w_i`; one step with index `i` is
//! `x ← x − γ a_i (a_i* x − y_i) = (I − γ a_i a_i*) x + γ a_i y_i`.
//! Indices come with or without replacement, or without replacement from a
//! pool holding several copies of every vector.

mod bound;
mod generators;
mod run;

pub use bound::{bound_rhs, c_kl, c_kl_estimate, phi, BoundTerms};
pub use generators::{
    gen_group_orbit, gen_spherical_design, ComplexVector, DesignKind, GeneratorSpec, OrbitVariant,
};
pub use run::{
    draw_indices, draw_noise, error_expansion_check, igm_run, monte_carlo_mse, IgmStats, Trajectory,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_norm, LinalgError, Matrix};

/// Tolerance on `‖(1/n)Σ a a* − σI‖` for the isotropic flag.
pub const ISOTROPY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IgmError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("vector family is empty")]
    EmptyFamily,
    #[error("vector {index} has length {got}, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("{name} has length {got}, expected {expected}")]
    ConfigLength {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("step size must be finite and nonnegative, got {0}")]
    StepSize(f64),
    #[error("noise level must be finite and nonnegative, got {0}")]
    NoiseLevel(f64),
    #[error("at least one step is required")]
    ZeroSteps,
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("sampling without replacement needs k <= pool size: k = {k}, pool = {pool}")]
    PoolExhausted { k: usize, pool: usize },
    #[error("block_repeat multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("index {index} out of range for {n} vectors")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("C(k,l) needs 0 <= l <= k <= n: n = {n}, k = {k}, l = {l}")]
    FallingFactorialRange { n: usize, k: usize, l: usize },
    #[error("family is not isotropic: residual {0:e}")]
    NotIsotropic(f64),
    #[error("phi = {0} is outside (0, 1)")]
    PhiOutOfRange(f64),
    #[error("k = {k} must be below the pool size {n}")]
    StepsReachPool { k: usize, n: usize },
    #[error("geometric ratio phi*exp(1/(n-k)) = {0} is not below 1")]
    GeometricRatio(f64),
    #[error("exponent a = 1/(n-k) + ln(phi) = {0} is not negative")]
    PositiveExponent(f64),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error(
        "unknown generator {0:?}; expected orbit:D, projector:D, simplex:M, cross:M or icosahedron"
    )]
    UnknownGenerator(String),
}

/// Data vectors `a_1..a_n` in `C^m` with their isotropy constants.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    m: usize,
    vectors: Vec<Vec<Complex64>>,
    sigma: f64,
    mu: f64,
    isotropy_residual: f64,
    real: bool,
}

impl VectorFamily {
    /// Computes `σ = tr(S)/m` for `S = (1/n)Σ a a*`, the residual
    /// `‖S − σI‖` and `μ = max ‖a_i‖²`.
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self, IgmError> {
        let Some(first) = vectors.first() else {
            return Err(IgmError::EmptyFamily);
        };
        let m = first.len();
        if m == 0 {
            return Err(IgmError::LengthMismatch {
                index: 0,
                expected: 1,
                got: 0,
            });
        }
        if let Some(index) = vectors.iter().position(|v| v.len() != m) {
            return Err(IgmError::LengthMismatch {
                index,
                expected: m,
                got: vectors[index].len(),
            });
        }
        let n = vectors.len() as f64;
        let mut s = Matrix::zeros(m);
        for v in &vectors {
            s += &Matrix::outer(v);
        }
        let s = s.scale_real(1.0 / n);
        let sigma = s.trace().re / m as f64;
        let mut dev = s;
        for i in 0..m {
            dev[(i, i)] -= sigma;
        }
        let mu = vectors.iter().map(|v| norm_sqr(v)).fold(0.0, f64::max);
        let real = vectors.iter().flatten().all(|z| z.im == 0.0);
        Ok(Self {
            m,
            sigma,
            mu,
            isotropy_residual: hermitian_norm(&dev),
            real,
            vectors,
        })
    }

    /// Real vectors given as plain coordinates.
    pub fn from_real(vectors: &[Vec<f64>]) -> Result<Self, IgmError> {
        Self::new(
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn isotropy_residual(&self) -> f64 {
        self.isotropy_residual
    }

    pub fn is_isotropic(&self) -> bool {
        self.isotropy_residual <= ISOTROPY_TOL
    }

    /// Whether every coordinate is real; real families get real noise.
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// `m·σ ≤ μ`, which trace arithmetic forces on any isotropic family.
    pub fn trace_inequality_holds(&self) -> bool {
        self.m as f64 * self.sigma <= self.mu * (1.0 + 1e-12)
    }
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// How step indices are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    WithReplacement,
    WithoutReplacement,
    /// Without replacement from a pool holding `mult` copies of each vector.
    BlockRepeat(usize),
}

impl Policy {
    /// Size of the pool indices are drawn from.
    pub fn pool_size(&self, n: usize) -> usize {
        match *self {
            Policy::BlockRepeat(mult) => n * mult,
            _ => n,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Policy::WithReplacement => "with_replacement".into(),
            Policy::WithoutReplacement => "without_replacement".into(),
            Policy::BlockRepeat(mult) => format!("block_repeat({mult})"),
        }
    }
}

/// Run parameters. Vectors serialize as `[re, im]` pairs; plain numbers are
/// accepted on input as real entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IgmConfig {
    pub gamma: f64,
    pub rho: f64,
    pub k: usize,
    pub policy: Policy,
    pub trials: usize,
    pub seed: u64,
    #[serde(with = "cvec")]
    pub x_star: Vec<Complex64>,
    #[serde(with = "cvec")]
    pub x_0: Vec<Complex64>,
}

impl IgmConfig {
    pub fn validate(&self, vecs: &VectorFamily) -> Result<(), IgmError> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(IgmError::StepSize(self.gamma));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(IgmError::NoiseLevel(self.rho));
        }
        if self.k == 0 {
            return Err(IgmError::ZeroSteps);
        }
        if self.trials == 0 {
            return Err(IgmError::ZeroTrials);
        }
        for (name, v) in [("x_star", &self.x_star), ("x_0", &self.x_0)] {
            if v.len() != vecs.m() {
                return Err(IgmError::ConfigLength {
                    name,
                    expected: vecs.m(),
                    got: v.len(),
                });
            }
        }
        match self.policy {
            Policy::WithReplacement => Ok(()),
            Policy::BlockRepeat(0) => Err(IgmError::ZeroMultiplicity),
            p => {
                let pool = p.pool_size(vecs.n());
                if self.k > pool {
                    Err(IgmError::PoolExhausted { k: self.k, pool })
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `η = ‖x_0 − x_*‖²`.
    pub fn eta(&self) -> f64 {
        self.x_0
            .iter()
            .zip(&self.x_star)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }
}

pub(crate) mod cvec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Pair([f64; 2]),
        Real(f64),
    }

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries
            .into_iter()
            .map(|e| match e {
                Entry::Pair([re, im]) => Complex64::new(re, im),
                Entry::Real(re) => Complex64::new(re, 0.0),
            })
            .collect())
    }
}
