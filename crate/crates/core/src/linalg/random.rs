//! Seeded random-matrix sampling.
//!
//! Every sampler takes an explicit [`RngStream`]; nothing draws from a global
//! generator. Independent substreams are derived from `(seed, index)` so that
//! trial-parallel code reproduces the sequential result bit for bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{Matrix, ZERO};

/// The random source threaded through every stochastic operation.
pub type RngStream = ChaCha8Rng;

/// Substream `index` of the generator seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard circularly-symmetric complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries (Ginibre).
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// Gaussian unitary ensemble scaled so that `E[G²] = I`.
pub fn gue<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let z = ginibre(dim, rng);
    (&z + &z.adjoint()).scale_real(1.0 / (2.0 * dim as f64).sqrt())
}

/// Haar-distributed unitary: Householder QR of a Ginibre matrix with the
/// diagonal of `R` phase-fixed to be positive.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    assert!(dim >= 1, "dimension must be positive");
    let n = dim;
    // cols[j] is column j of the Gaussian matrix, contiguous.
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| complex_gaussian(rng)).collect())
        .collect();
    // The Gaussian is generated column by column; only its distribution
    // matters, so no transpose is needed.
    let mut reflectors: Vec<(Vec<Complex64>, f64)> = Vec::with_capacity(n);
    let mut r_phase = vec![Complex64::new(1.0, 0.0); n];

    for k in 0..n {
        let x = &cols[k][k..];
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let x0 = x[0];
        let x0_abs = x0.norm();
        let phase = if x0_abs > 0.0 {
            x0 / x0_abs
        } else {
            Complex64::new(1.0, 0.0)
        };
        if alpha == 0.0 {
            reflectors.push((Vec::new(), 0.0));
            continue;
        }
        // H x = -phase * alpha * e1
        r_phase[k] = -phase;
        let mut v: Vec<Complex64> = x.to_vec();
        v[0] += phase * alpha;
        let tau = 1.0 / (alpha * (alpha + x0_abs));
        for col in cols.iter_mut().skip(k + 1) {
            let tail = &mut col[k..];
            let s: Complex64 = v.iter().zip(tail.iter()).map(|(a, b)| a.conj() * b).sum();
            let s = s * tau;
            for (t, &vi) in tail.iter_mut().zip(&v) {
                *t -= vi * s;
            }
        }
        reflectors.push((v, tau));
    }

    // Q = H_0 H_1 ... H_{n-1}; accumulate from the right end onto identity
    // columns, then scale column k by the phase of R_kk.
    let mut q_cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    for k in (0..n).rev() {
        let (v, tau) = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        // Columns j < k are still e_j and vanish on rows k.., so H_k fixes them.
        for col in q_cols.iter_mut().skip(k) {
            let tail = &mut col[k..];
            let s: Complex64 = v.iter().zip(tail.iter()).map(|(a, b)| a.conj() * b).sum();
            let s = s * *tau;
            for (t, &vi) in tail.iter_mut().zip(v) {
                *t -= vi * s;
            }
        }
    }
    // R_kk = r_phase[k] * alpha_k; multiplying column k of Q by r_phase[k]
    // and row k of R by its conjugate leaves a positive diagonal.
    Matrix::from_fn(n, |i, j| q_cols[j][i] * r_phase[j])
}
