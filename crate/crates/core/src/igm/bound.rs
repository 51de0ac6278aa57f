use serde::{Deserialize, Serialize};

use super::{norm_sqr, IgmConfig, IgmError, VectorFamily};

/// Contraction factor `φ = 1 − 2γσ + γ²σμ`.
pub fn phi(gamma: f64, sigma: f64, mu: f64) -> f64 {
    1.0 - 2.0 * gamma * sigma + gamma * gamma * sigma * mu
}

fn ln_falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln()).sum()
}

/// `C_{k,l} = n^{(l)} · n^{(k−l)} / n^{(k)}` with `n^{(j)}` the falling
/// factorial, evaluated in log space.
pub fn c_kl(n: usize, k: usize, l: usize) -> Result<f64, IgmError> {
    if l > k || k > n {
        return Err(IgmError::FallingFactorialRange { n, k, l });
    }
    Ok((ln_falling(n, l) + ln_falling(n, k - l) - ln_falling(n, k)).exp())
}

/// The estimate `exp(l(k−l)/(n−k))` of [`c_kl`]; `1` when `l(k−l) = 0` and
/// infinite when `k = n` otherwise.
pub fn c_kl_estimate(n: usize, k: usize, l: usize) -> Result<f64, IgmError> {
    if l > k || k > n {
        return Err(IgmError::FallingFactorialRange { n, k, l });
    }
    let num = (l * (k - l)) as f64;
    if num == 0.0 {
        return Ok(1.0);
    }
    if k == n {
        return Ok(f64::INFINITY);
    }
    Ok((num / (n - k) as f64).exp())
}

/// The pieces of the bound at one step count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub value: f64,
    pub phi: f64,
    /// `sup ‖I − γ a a*‖² / φ`.
    pub c1: f64,
    /// `(a² − 2a + 2)/(−a)³`.
    pub c2: f64,
    /// `1/(n−k) + ln φ`.
    pub a: f64,
    /// `φ · exp(1/(n−k))`.
    pub ratio: f64,
    /// `φ^k (1 + k(k−1)(1+C₁)/(2n)) η`.
    pub initial_term: f64,
    /// `ρ²γ²μ (1/(1−ratio) + C₂·ratio + 1)`.
    pub noise_term: f64,
}

/// Upper estimate of the without-replacement mean squared error after `k`
/// steps:
///
/// `φ^k (1 + k(k−1)(1+C₁)/(2n)) η + ρ²γ²μ (1/(1−φe^{1/(n−k)}) + C₂ φe^{1/(n−k)} + 1)`.
///
/// `n` is the sampling pool size (the family size, times the multiplicity for
/// `block_repeat`). Fails, naming the condition, unless the family is
/// isotropic, `φ ∈ (0, 1)`, `k < n`, `φ e^{1/(n−k)} < 1` and
/// `1/(n−k) + ln φ < 0`.
pub fn bound_rhs(vecs: &VectorFamily, cfg: &IgmConfig, k: usize) -> Result<BoundTerms, IgmError> {
    if !vecs.is_isotropic() {
        return Err(IgmError::NotIsotropic(vecs.isotropy_residual()));
    }
    let (gamma, sigma, mu) = (cfg.gamma, vecs.sigma(), vecs.mu());
    let p = phi(gamma, sigma, mu);
    if !(p > 0.0 && p < 1.0) {
        return Err(IgmError::PhiOutOfRange(p));
    }
    let n = cfg.policy.pool_size(vecs.n());
    if k >= n {
        return Err(IgmError::StepsReachPool { k, n });
    }
    let inv = 1.0 / (n - k) as f64;
    let ratio = p * inv.exp();
    if !(ratio < 1.0) {
        return Err(IgmError::GeometricRatio(ratio));
    }
    let a = inv + p.ln();
    if !(a < 0.0) {
        return Err(IgmError::PositiveExponent(a));
    }
    // ‖I − γ a a*‖ = max(1, |1 − γ‖a‖²|) once m ≥ 2; for m = 1 only the second.
    let sup_norm = vecs
        .vectors()
        .iter()
        .map(|v| {
            let t = (1.0 - gamma * norm_sqr(v)).abs();
            if vecs.m() >= 2 {
                t.max(1.0)
            } else {
                t
            }
        })
        .fold(0.0, f64::max);
    let c1 = sup_norm * sup_norm / p;
    let c2 = (a * a - 2.0 * a + 2.0) / (-a).powi(3);
    let kf = k as f64;
    let initial_term =
        p.powi(k as i32) * (1.0 + kf * (kf - 1.0) * (1.0 + c1) / (2.0 * n as f64)) * cfg.eta();
    let noise_term =
        cfg.rho * cfg.rho * gamma * gamma * mu * (1.0 / (1.0 - ratio) + c2 * ratio + 1.0);
    Ok(BoundTerms {
        value: initial_term + noise_term,
        phi: p,
        c1,
        c2,
        a,
        ratio,
        initial_term,
        noise_term,
    })
}

#[cfg(test)]
mod tests {
    use super::super::Policy;
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.0, 1.0, 5.0), 1.0);
        let d = 4.0;
        let g = 0.1;
        assert!((phi(g, 1.0, d) - (1.0 - 2.0 * g + g * g * d)).abs() < 1e-15);
        let mu = 3.0;
        assert!((phi(1.0 / mu, 1.0, mu) - (1.0 - 1.0 / mu)).abs() < 1e-15);
    }

    #[test]
    fn falling_factorial_ratios() {
        assert_eq!(c_kl(4, 2, 0).unwrap(), 1.0);
        assert!((c_kl(4, 2, 1).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!(c_kl(3, 4, 1).is_err());
        for n in 1..=20 {
            for k in 0..=n {
                for l in 0..=k {
                    let a = c_kl(n, k, l).unwrap();
                    let b = c_kl(n, k, k - l).unwrap();
                    assert!((a - b).abs() <= 1e-12 * a);
                }
            }
        }
        assert_eq!(c_kl_estimate(5, 5, 2).unwrap(), f64::INFINITY);
        assert_eq!(c_kl_estimate(5, 5, 0).unwrap(), 1.0);
    }

    fn cfg(gamma: f64, rho: f64, x0: f64) -> IgmConfig {
        IgmConfig {
            gamma,
            rho,
            k: 2,
            policy: Policy::WithoutReplacement,
            trials: 1,
            seed: 0,
            x_star: vec![Complex64::new(0.0, 0.0); 2],
            x_0: vec![Complex64::new(x0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    #[test]
    fn bound_preconditions() {
        let f = VectorFamily::from_real(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
        ])
        .unwrap();
        // sigma = 1/2, mu = 1
        let zero = bound_rhs(&f, &cfg(1.0, 0.0, 0.0), 1).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(matches!(
            bound_rhs(&f, &cfg(0.0, 0.0, 1.0), 1),
            Err(IgmError::PhiOutOfRange(_))
        ));
        assert!(matches!(
            bound_rhs(&f, &cfg(1.0, 0.0, 1.0), 4),
            Err(IgmError::StepsReachPool { .. })
        ));
        assert!(matches!(
            bound_rhs(&f, &cfg(1.0, 0.0, 1.0), 3),
            Err(IgmError::GeometricRatio(_))
        ));
        let t = bound_rhs(&f, &cfg(1.0, 0.5, 1.0), 2).unwrap();
        assert!((t.phi - 0.5).abs() < 1e-15);
        assert!((t.c1 - 2.0).abs() < 1e-15);
        assert!(t.a < 0.0 && t.c2 > 0.0);
        assert!((t.value - t.initial_term - t.noise_term).abs() < 1e-15);
    }
}
