use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::{bound_rhs, BoundTerms};
use super::{IgmConfig, IgmError, Policy, VectorFamily};
use crate::linalg::{complex_gaussian, substream, Matrix, RngStream};

/// States `x_0..x_k` of one run with the indices visited.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub indices: Vec<usize>,
    pub noise: Vec<Complex64>,
    pub states: Vec<Vec<Complex64>>,
}

impl Trajectory {
    /// `‖x_j − x_*‖²` for every `j = 0..=k`.
    pub fn squared_errors(&self, x_star: &[Complex64]) -> Vec<f64> {
        self.states.iter().map(|x| dist_sqr(x, x_star)).collect()
    }
}

fn dist_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

fn dot(a: &[Complex64], x: &[Complex64]) -> Complex64 {
    a.iter().zip(x).map(|(ai, xi)| ai.conj() * xi).sum()
}

/// `k` data indices drawn according to `policy` from `n` vectors.
///
/// Without replacement yields a uniformly random ordered `k`-subset;
/// `block_repeat(mult)` does the same on a pool of `n·mult` copies, pool slot
/// `p` holding vector `p mod n`.
pub fn draw_indices<R: Rng + ?Sized>(
    policy: Policy,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>, IgmError> {
    match policy {
        Policy::WithReplacement => Ok((0..k).map(|_| rng.random_range(0..n)).collect()),
        Policy::BlockRepeat(0) => Err(IgmError::ZeroMultiplicity),
        p => {
            let pool = p.pool_size(n);
            if k > pool {
                return Err(IgmError::PoolExhausted { k, pool });
            }
            Ok(index::sample(rng, pool, k)
                .into_iter()
                .map(|s| s % n)
                .collect())
        }
    }
}

/// One noise value per data vector: real `N(0, ρ²)` for real families,
/// circular complex Gaussian with `E|w|² = ρ²` otherwise.
pub fn draw_noise<R: Rng + ?Sized>(vecs: &VectorFamily, rho: f64, rng: &mut R) -> Vec<Complex64> {
    (0..vecs.n())
        .map(|_| {
            if vecs.is_real() {
                let z: f64 = rng.sample(StandardNormal);
                Complex64::new(rho * z, 0.0)
            } else {
                complex_gaussian(rng) * rho
            }
        })
        .collect()
}

fn run_with(
    vecs: &VectorFamily,
    cfg: &IgmConfig,
    indices: Vec<usize>,
    noise: Vec<Complex64>,
) -> Trajectory {
    let gamma = cfg.gamma;
    let mut x = cfg.x_0.clone();
    let mut states = Vec::with_capacity(indices.len() + 1);
    states.push(x.clone());
    for &i in &indices {
        let a = &vecs.vectors()[i];
        let y = dot(a, &cfg.x_star) + noise[i];
        let r = (dot(a, &x) - y) * gamma;
        for (xj, aj) in x.iter_mut().zip(a) {
            *xj -= aj * r;
        }
        states.push(x.clone());
    }
    Trajectory {
        indices,
        noise,
        states,
    }
}

/// One run of `cfg.k` steps. Noise for the whole dataset is drawn first,
/// then the index sequence.
pub fn igm_run(
    vecs: &VectorFamily,
    cfg: &IgmConfig,
    rng: &mut RngStream,
) -> Result<Trajectory, IgmError> {
    cfg.validate(vecs)?;
    let noise = draw_noise(vecs, cfg.rho, rng);
    let indices = draw_indices(cfg.policy, vecs.n(), cfg.k, rng)?;
    Ok(run_with(vecs, cfg, indices, noise))
}

/// Largest entry gap between the recursion's final error `x_k − x_*` and the
/// expanded form
/// `Π_j (I − γ a_j a_j*)(x_0 − x_*) + Σ_l [Π_{j>l} (I − γ a_j a_j*)] γ a_l w_l`,
/// with the products built as explicit matrices.
pub fn error_expansion_check(
    vecs: &VectorFamily,
    cfg: &IgmConfig,
    indices: &[usize],
    noise: &[Complex64],
) -> Result<f64, IgmError> {
    if noise.len() != vecs.n() {
        return Err(IgmError::ConfigLength {
            name: "noise",
            expected: vecs.n(),
            got: noise.len(),
        });
    }
    if let Some(&index) = indices.iter().find(|&&i| i >= vecs.n()) {
        return Err(IgmError::IndexOutOfRange { index, n: vecs.n() });
    }
    let m = vecs.m();
    let traj = run_with(vecs, cfg, indices.to_vec(), noise.to_vec());
    let direct: Vec<Complex64> = traj.states[indices.len()]
        .iter()
        .zip(&cfg.x_star)
        .map(|(x, s)| x - s)
        .collect();

    let step = |i: usize| {
        let mut s = Matrix::outer(&vecs.vectors()[i]).scale_real(-cfg.gamma);
        for j in 0..m {
            s[(j, j)] += 1.0;
        }
        s
    };
    // suffix[l] = A_{k} ⋯ A_{l+1}, built from the right end.
    let k = indices.len();
    let mut suffix = vec![Matrix::identity(m); k + 1];
    for l in (0..k).rev() {
        suffix[l] = suffix[l + 1].matmul(&step(indices[l]));
    }
    let e0: Vec<Complex64> = cfg
        .x_0
        .iter()
        .zip(&cfg.x_star)
        .map(|(x, s)| x - s)
        .collect();
    let mut expanded = suffix[0].matvec(&e0);
    for (l, &i) in indices.iter().enumerate() {
        let v: Vec<Complex64> = vecs.vectors()[i]
            .iter()
            .map(|a| a * noise[i] * cfg.gamma)
            .collect();
        for (e, t) in expanded.iter_mut().zip(suffix[l + 1].matvec(&v)) {
            *e += t;
        }
    }
    Ok(direct
        .iter()
        .zip(&expanded)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Per-step Monte Carlo error curve with the analytic bound alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IgmStats {
    pub policy: Policy,
    pub trials: usize,
    /// Step counts `0..=K`.
    pub steps: Vec<usize>,
    pub mean_mse: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `None` where a precondition of [`bound_rhs`] fails.
    pub bound: Vec<Option<f64>>,
    /// Why the bound is missing, per step.
    pub bound_error: Vec<Option<String>>,
    pub c2: Vec<Option<f64>>,
    pub phi: f64,
    pub c1: Option<f64>,
    pub eta: f64,
    /// Steps beyond `n^{1/3}`, where the falling-factorial ratios stop being
    /// close to 1.
    pub k_exceeds_cube_root: bool,
}

impl IgmStats {
    /// Whether `mean ≤ bound + z·stderr` at every step where the bound exists.
    pub fn envelope_holds(&self, z: f64) -> bool {
        self.first_violation(z).is_none()
    }

    pub fn first_violation(&self, z: f64) -> Option<usize> {
        (0..self.steps.len()).find(|&j| match self.bound[j] {
            Some(b) => self.mean_mse[j] > b + z * self.stderr[j],
            None => false,
        })
    }
}

/// Runs `cfg.trials` independent trials in parallel, trial `t` on substream
/// `t` of `cfg.seed`, and reduces in trial order.
pub fn monte_carlo_mse(vecs: &VectorFamily, cfg: &IgmConfig) -> Result<IgmStats, IgmError> {
    cfg.validate(vecs)?;
    let errors: Vec<Vec<f64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(cfg.seed, t as u64);
            igm_run(vecs, cfg, &mut rng).map(|tr| tr.squared_errors(&cfg.x_star))
        })
        .collect::<Result<_, _>>()?;

    let steps: Vec<usize> = (0..=cfg.k).collect();
    let tf = cfg.trials as f64;
    let mut mean_mse = vec![0.0; cfg.k + 1];
    for e in &errors {
        for (m, v) in mean_mse.iter_mut().zip(e) {
            *m += v;
        }
    }
    mean_mse.iter_mut().for_each(|m| *m /= tf);
    let mut var = vec![0.0; cfg.k + 1];
    for e in &errors {
        for ((s, v), m) in var.iter_mut().zip(e).zip(&mean_mse) {
            *s += (v - m) * (v - m);
        }
    }
    let stderr: Vec<f64> = if cfg.trials > 1 {
        var.iter().map(|s| (s / (tf - 1.0) / tf).sqrt()).collect()
    } else {
        vec![0.0; cfg.k + 1]
    };

    let terms: Vec<Result<BoundTerms, IgmError>> =
        steps.iter().map(|&k| bound_rhs(vecs, cfg, k)).collect();
    let c1 = terms.iter().find_map(|t| t.as_ref().ok().map(|b| b.c1));
    let pool = cfg.policy.pool_size(vecs.n());
    Ok(IgmStats {
        policy: cfg.policy,
        trials: cfg.trials,
        bound: terms
            .iter()
            .map(|t| t.as_ref().ok().map(|b| b.value))
            .collect(),
        bound_error: terms
            .iter()
            .map(|t| t.as_ref().err().map(|e| e.to_string()))
            .collect(),
        c2: terms
            .iter()
            .map(|t| t.as_ref().ok().map(|b| b.c2))
            .collect(),
        phi: super::phi(cfg.gamma, vecs.sigma(), vecs.mu()),
        c1,
        eta: cfg.eta(),
        k_exceeds_cube_root: (cfg.k as f64) >= (pool as f64).cbrt(),
        steps,
        mean_mse,
        stderr,
    })
}
