//! Hermitian eigenvalue routines.
//!
//! Two independent paths:
//!
//! - [`eigvalsh`]: Householder reduction to a real symmetric tridiagonal matrix
//!   followed by Sturm-sequence bisection. Values only, O(n³) with a small
//!   constant, used for every norm and order check regardless of dimension.
//! - [`eigh`]: cyclic complex Jacobi rotations. Values and vectors, intended
//!   for the small matrices that need functional calculus (inverse square
//!   roots when normalizing a family).

use num_complex::Complex64;

use super::matrix::{Matrix, ZERO};

/// Reduces a Hermitian matrix to real symmetric tridiagonal form with the same
/// spectrum. Returns `(diagonal, off_diagonal)`; the off-diagonal has length
/// `dim − 1` and holds nonnegative magnitudes.
///
/// Only the Hermitian part of `m` is read.
pub fn tridiagonalize(m: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut off = vec![0.0; n.saturating_sub(1)];

    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let alpha = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        off[k] = alpha;
        if len == 1 || alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let x0_abs = x0.norm();
        let phase = if x0_abs > 0.0 {
            x0 / x0_abs
        } else {
            Complex64::new(1.0, 0.0)
        };
        let v = &mut v[..len];
        for (t, vi) in v.iter_mut().enumerate() {
            *vi = a[(k + 1 + t, k)];
        }
        v[0] += phase * alpha;
        let tau = 1.0 / (alpha * (alpha + x0_abs));

        // p = tau * B v, with B the trailing block
        let p = &mut p[..len];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a.row(k + 1 + r)[k + 1..];
            *pr = row
                .iter()
                .zip(v.iter())
                .fold(ZERO, |acc, (&b, &x)| acc + b * x)
                * tau;
        }
        let beta: Complex64 = v.iter().zip(p.iter()).map(|(x, y)| x.conj() * y).sum();
        let half = 0.5 * tau * beta.re;
        for (pr, &vr) in p.iter_mut().zip(v.iter()) {
            *pr -= vr * half;
        }
        // B <- B - v q* - q v*
        for r in 0..len {
            let (vr, qr) = (v[r], p[r]);
            let base = (k + 1 + r) * n + k + 1;
            let row = &mut a.as_mut_slice()[base..base + len];
            for c in 0..len {
                row[c] -= vr * p[c].conj() + qr * v[c].conj();
            }
        }
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    (diag, off)
}

/// Number of eigenvalues of the symmetric tridiagonal `(diag, off)` strictly
/// below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() <= pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1] } else { 0.0 } + if i + 1 < n { off[i] } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = f64::EPSILON * (lo.abs().max(hi.abs())).max(f64::MIN_POSITIVE) * 4.0;
    (lo - pad, hi + pad)
}

/// The `index`-th smallest eigenvalue (0-based) of a symmetric tridiagonal
/// matrix, by bisection to working precision.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], index: usize) -> f64 {
    assert!(index < diag.len(), "eigenvalue index out of range");
    let max_off_sq = off.iter().map(|e| e * e).fold(0.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_off_sq.max(1.0);
    let (mut lo, mut hi) = gershgorin(diag, off);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid, pivmin) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues of the Hermitian part of `m`, ascending.
pub fn eigvalsh(m: &Matrix) -> Vec<f64> {
    let (mut d, e) = tridiagonalize(m);
    if e.iter().all(|&x| x == 0.0) {
        d.sort_by(f64::total_cmp);
        return d;
    }
    (0..d.len())
        .map(|k| tridiagonal_eigenvalue(&d, &e, k))
        .collect()
}

/// Smallest and largest eigenvalues of the Hermitian part of `m`.
pub fn extreme_eigenvalues(m: &Matrix) -> (f64, f64) {
    let (d, e) = tridiagonalize(m);
    if e.iter().all(|&x| x == 0.0) {
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return (lo, hi);
    }
    (
        tridiagonal_eigenvalue(&d, &e, 0),
        tridiagonal_eigenvalue(&d, &e, d.len() - 1),
    )
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Matrix,
}

impl HermitianEigen {
    /// `V f(Λ) V*` for a real function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        Matrix::from_fn(n, |i, j| {
            (0..n).fold(ZERO, |acc, k| acc + v[(i, k)] * fv[k] * v[(j, k)].conj())
        })
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Jacobi eigen-decomposition of the Hermitian part of `m`.
pub fn eigh(m: &Matrix) -> HermitianEigen {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale * 1e-2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * r);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let g00 = Complex64::new(c, 0.0);
                let g01 = Complex64::new(s, 0.0);
                let g10 = -phase.conj() * s;
                let g11 = phase.conj() * c;
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * g00 + y * g10;
                    a[(k, q)] = x * g01 + y * g11;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = g00.conj() * x + g10.conj() * y;
                    a[(q, k)] = g01.conj() * x + g11.conj() * y;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * g00 + y * g10;
                    v[(k, q)] = x * g01 + y * g11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, |i, k| v[(i, order[k])]);
    HermitianEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_hermitian(n: usize, salt: f64) -> Matrix {
        let m = Matrix::from_fn(n, |i, j| {
            Complex64::new(
                ((i * 7 + j * 3) as f64 + salt).sin(),
                ((i * 5 + j * 11) as f64 * salt).cos(),
            )
        });
        m.hermitian_part()
    }

    #[test]
    fn diagonal_spectrum_is_recovered_exactly() {
        let m = Matrix::from_real_diagonal(&[3.0, -1.0, 0.5]);
        let ev = eigvalsh(&m);
        assert_eq!(ev.len(), 3);
        assert!((ev[0] + 1.0).abs() < 1e-15);
        assert!((ev[1] - 0.5).abs() < 1e-15);
        assert!((ev[2] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn bisection_and_jacobi_agree() {
        for n in [1, 2, 3, 5, 9, 16] {
            let m = sample_hermitian(n, 0.37 * n as f64);
            let a = eigvalsh(&m);
            let b = eigh(&m).values;
            for (x, y) in a.iter().zip(&b) {
                assert!(
                    (x - y).abs() < 1e-12 * m.frobenius_norm().max(1.0),
                    "{x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn jacobi_vectors_reconstruct_the_matrix() {
        let m = sample_hermitian(6, 1.7);
        let eig = eigh(&m);
        let back = eig.apply(|x| x);
        assert!(back.max_abs_diff(&m) < 1e-12);
        let vv = eig.vectors.adjoint_matmul(&eig.vectors);
        assert!(vv.max_abs_diff(&Matrix::identity(6)) < 1e-13);
    }

    #[test]
    fn repeated_eigenvalues_and_zero_offdiagonal_blocks() {
        let m = Matrix::from_real_diagonal(&[2.0, 2.0, 2.0, -2.0]);
        assert_eq!(extreme_eigenvalues(&m), (-2.0, 2.0));
        let z = Matrix::zeros(3);
        assert_eq!(eigvalsh(&z), vec![0.0, 0.0, 0.0]);
    }
}
