use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::mean_gram;
use super::sums::{e_wo_recursive, e_wr_nested};
use super::{OperatorFamily, SymError};
use crate::linalg::{gue, haar_unitary, hermitian_norm, substream, Matrix, RngStream};

/// Fewest trials accepted by [`deviation_experiment`].
pub const MIN_TRIALS: usize = 30;

/// Distribution of the i.i.d. operators; every kind has `E[A*A] = I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// `A = I`, no randomness.
    Identity,
    /// Haar unitaries: `A*A = I` for every draw.
    HaarUnitary,
    /// `A = U (I + δG)/sqrt(1 + δ²)` with `U` Haar and `G` GUE scaled so
    /// `E[G²] = I`.
    PerturbedIsometry { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySampler {
    pub m: usize,
    #[serde(flatten)]
    pub kind: SamplerKind,
}

impl FamilySampler {
    pub fn sample(&self, rng: &mut RngStream) -> Matrix {
        match self.kind {
            SamplerKind::Identity => Matrix::identity(self.m),
            SamplerKind::HaarUnitary => haar_unitary(self.m, rng),
            SamplerKind::PerturbedIsometry { delta } => {
                let u = haar_unitary(self.m, rng);
                let mut h = gue(self.m, rng).scale_real(delta);
                for i in 0..self.m {
                    h[(i, i)] += 1.0;
                }
                u.matmul(&h).scale_real(1.0 / (1.0 + delta * delta).sqrt())
            }
        }
    }

    pub fn family(&self, n: usize, rng: &mut RngStream) -> OperatorFamily {
        let ops = (0..n).map(|_| self.sample(rng)).collect();
        OperatorFamily::new(ops).expect("sampled operators share a dimension")
    }
}

/// A `(E X^p)^{1/p}` estimate with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub sampler: FamilySampler,
    pub n: usize,
    pub d: usize,
    pub p: u32,
    pub trials: usize,
    /// `(E‖ΣA*A − nI‖^p)^{1/p} / n`.
    pub epsilon_hat: MomentEstimate,
    /// `(E‖E_wo,d − I‖^p)^{1/p}`; `I` is the exact mean of `E_wo,d`.
    pub delta_wo: MomentEstimate,
    /// The same moment centered at the sample mean of `E_wo,d`.
    pub delta_wo_sample_centered: f64,
    /// `(E‖E_wo,d‖^p)^{1/p} / (E‖E_wr,d‖^p)^{1/p}`.
    pub ratio: MomentEstimate,
    /// `d · ε̂`, the predicted scale of `Δ_wo`.
    pub predicted_delta_scale: f64,
    /// `1 + d · ε̂`, the predicted scale of the ratio.
    pub predicted_ratio_scale: f64,
}

struct Trial {
    eps: f64,
    wo: Matrix,
    wo_norm: f64,
    wr_norm: f64,
}

fn moment(xs: &[f64], p: u32) -> (f64, f64) {
    let t = xs.len() as f64;
    let pw: Vec<f64> = xs.iter().map(|x| x.powi(p as i32)).collect();
    let mean = pw.iter().sum::<f64>() / t;
    let var = pw.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (t - 1.0);
    (mean, var)
}

fn root_estimate(xs: &[f64], p: u32) -> MomentEstimate {
    let (mean, var) = moment(xs, p);
    let se_mean = (var / xs.len() as f64).sqrt();
    let value = mean.powf(1.0 / p as f64);
    let stderr = if mean > 0.0 {
        value / (p as f64 * mean) * se_mean
    } else {
        0.0
    };
    MomentEstimate { value, stderr }
}

fn ratio_estimate(num: &[f64], den: &[f64], p: u32) -> MomentEstimate {
    let t = num.len() as f64;
    let a: Vec<f64> = num.iter().map(|x| x.powi(p as i32)).collect();
    let b: Vec<f64> = den.iter().map(|x| x.powi(p as i32)).collect();
    let ma = a.iter().sum::<f64>() / t;
    let mb = b.iter().sum::<f64>() / t;
    let cov = |u: &[f64], mu: f64, v: &[f64], mv: f64| {
        u.iter()
            .zip(v)
            .map(|(x, y)| (x - mu) * (y - mv))
            .sum::<f64>()
            / (t - 1.0)
    };
    let (vaa, vbb, vab) = (
        cov(&a, ma, &a, ma),
        cov(&b, mb, &b, mb),
        cov(&a, ma, &b, mb),
    );
    let r = ma / mb;
    // Var(ma/mb) ≈ r²(vaa/ma² + vbb/mb² − 2vab/(ma·mb))/T, then the 1/p root.
    let rel = (vaa / (ma * ma) + vbb / (mb * mb) - 2.0 * vab / (ma * mb)).max(0.0) / t;
    let value = r.powf(1.0 / p as f64);
    MomentEstimate {
        value,
        stderr: value / p as f64 * rel.sqrt(),
    }
}

/// Monte Carlo estimates of the with/without-replacement deviation
/// quantities for `n` i.i.d. draws from `sampler`.
///
/// A base seed is taken from `rng`; trial `t` uses substream `t` of that
/// seed and trials run in parallel, reduced in trial order.
pub fn deviation_experiment(
    sampler: &FamilySampler,
    n: usize,
    d: usize,
    p: u32,
    trials: usize,
    rng: &mut RngStream,
) -> Result<DeviationReport, SymError> {
    if trials < MIN_TRIALS {
        return Err(SymError::TooFewTrials {
            trials,
            min: MIN_TRIALS,
        });
    }
    if d == 0 || 4 * d > n {
        return Err(SymError::DegreeTooLargeForDeviation { d, n });
    }
    if ![1, 2, 4].contains(&p) {
        return Err(SymError::MomentExponent(p));
    }
    let base: u64 = rng.random();
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Trial, SymError> {
            let mut r = substream(base, t as u64);
            let fam = sampler.family(n, &mut r);
            let mut dev = mean_gram(fam.working_ops());
            for i in 0..sampler.m {
                dev[(i, i)] -= 1.0;
            }
            let wo = e_wo_recursive(&fam, d)?;
            let wr = e_wr_nested(&fam, d)?;
            Ok(Trial {
                eps: hermitian_norm(&dev),
                wo_norm: hermitian_norm(&wo),
                wr_norm: hermitian_norm(&wr),
                wo,
            })
        })
        .collect::<Result<_, _>>()?;

    let m = sampler.m;
    let eps: Vec<f64> = results.iter().map(|r| r.eps).collect();
    let centered: Vec<f64> = results
        .iter()
        .map(|r| {
            let mut x = r.wo.clone();
            for i in 0..m {
                x[(i, i)] -= 1.0;
            }
            hermitian_norm(&x)
        })
        .collect();
    let mut mean = Matrix::zeros(m);
    for r in &results {
        mean += &r.wo;
    }
    let mean = mean.scale_real(1.0 / trials as f64);
    let sample_centered: Vec<f64> = results
        .iter()
        .map(|r| hermitian_norm(&(&r.wo - &mean)))
        .collect();
    let wo_norms: Vec<f64> = results.iter().map(|r| r.wo_norm).collect();
    let wr_norms: Vec<f64> = results.iter().map(|r| r.wr_norm).collect();

    let epsilon_hat = root_estimate(&eps, p);
    Ok(DeviationReport {
        sampler: *sampler,
        n,
        d,
        p,
        trials,
        epsilon_hat,
        delta_wo: root_estimate(&centered, p),
        delta_wo_sample_centered: root_estimate(&sample_centered, p).value,
        ratio: ratio_estimate(&wo_norms, &wr_norms, p),
        predicted_delta_scale: d as f64 * epsilon_hat.value,
        predicted_ratio_scale: 1.0 + d as f64 * epsilon_hat.value,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
