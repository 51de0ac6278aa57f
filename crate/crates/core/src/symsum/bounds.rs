use serde::{Deserialize, Serialize};

use super::sums::{e_wo, partition_sum};
use super::{OperatorFamily, SymError};
use crate::linalg::{min_eig_hermitian, spectral_norm, Matrix, SPECTRAL_REL_TOL};
use crate::partitions::{enumerate_partitions, Partition};

/// Slack on order checks: a minimum eigenvalue down to `−ORDER_SLACK` counts
/// as nonnegative.
pub const ORDER_SLACK: f64 = 1e-9;

/// Measured norm of one partition sum next to its estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionDetail {
    /// 1-based block notation, e.g. `{1,3}{2}`.
    pub partition: String,
    pub nu: usize,
    pub measured: f64,
    /// `n^ν · C^{|σ|−ν}`.
    pub bound: f64,
    /// For one-block partitions only: the sharper `C^{|σ|}` estimate, reported
    /// next to the general one and never asserted.
    pub one_block_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymReport {
    pub d: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `(1 + C)/n · d(d−1)/2`.
    pub epsilon: f64,
    pub passed: bool,
    /// `λ_min(E_wo − (1−ε)I)` for sandwich reports.
    pub lower_margin: Option<f64>,
    /// `λ_min((1+ε)I − E_wo)` for sandwich reports.
    pub upper_margin: Option<f64>,
    pub detail: Vec<PartitionDetail>,
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + ORDER_SLACK * rhs.max(1.0)
}

/// `ε = (1 + C)/n · d(d−1)/2`.
pub fn epsilon(c: f64, n: usize, d: usize) -> f64 {
    (1.0 + c) / n as f64 * (d * d.saturating_sub(1)) as f64 / 2.0
}

/// `n^{ν(σ)} · C^{|σ|−ν(σ)}` for a normalized family.
pub fn bound_partition_sum(fam: &OperatorFamily, sigma: &Partition) -> Result<f64, SymError> {
    fam.require_normalized()?;
    Ok(lemma_bound(fam.n(), fam.c(), sigma))
}

fn lemma_bound(n: usize, c: f64, sigma: &Partition) -> f64 {
    (n as f64).powi(sigma.nu() as i32) * c.powi((sigma.d() - sigma.nu()) as i32)
}

/// `n^{ν(σ)} · C^{|σ|−ν(σ)} · (1 + 1/C)`, the estimate for `‖[[σ]]‖`.
pub fn bound_folded_sum(fam: &OperatorFamily, sigma: &Partition) -> Result<f64, SymError> {
    fam.require_normalized()?;
    Ok(lemma_bound(fam.n(), fam.c(), sigma) * (1.0 + 1.0 / fam.c()))
}

fn norm(m: &Matrix) -> Result<f64, SymError> {
    Ok(spectral_norm(m, SPECTRAL_REL_TOL)?.value)
}

/// Measured `‖[σ]‖` against the estimates for every partition of degree `d`.
pub fn partition_breakdown(
    fam: &OperatorFamily,
    d: usize,
) -> Result<Vec<PartitionDetail>, SymError> {
    fam.require_normalized()?;
    let c = fam.c();
    enumerate_partitions(d)?
        .into_iter()
        .map(|sigma| {
            let measured = norm(&partition_sum(fam, &sigma)?)?;
            Ok(PartitionDetail {
                partition: sigma.to_string(),
                nu: sigma.nu(),
                measured,
                bound: lemma_bound(fam.n(), c, &sigma),
                one_block_bound: (sigma.nu() == 1).then(|| c.powi(d as i32)),
            })
        })
        .collect()
}

/// `‖I − E_wo,d‖ ≤ (1+C)·d(d−1)/(2n)` on a normalized family.
pub fn check_theorem_bound(fam: &OperatorFamily, d: usize) -> Result<SymReport, SymError> {
    check_theorem_bound_with(fam, d, false)
}

/// As [`check_theorem_bound`], optionally attaching the per-partition
/// breakdown.
pub fn check_theorem_bound_with(
    fam: &OperatorFamily,
    d: usize,
    with_detail: bool,
) -> Result<SymReport, SymError> {
    fam.require_normalized()?;
    let wo = e_wo(fam, d)?;
    let mut gap = Matrix::identity(fam.m());
    gap -= &wo;
    let lhs = norm(&gap)?;
    let eps = epsilon(fam.c(), fam.n(), d);
    Ok(SymReport {
        d,
        lhs,
        rhs: eps,
        epsilon: eps,
        passed: within(lhs, eps),
        lower_margin: None,
        upper_margin: None,
        detail: if with_detail {
            partition_breakdown(fam, d)?
        } else {
            Vec::new()
        },
    })
}

/// `(1−ε)I ≤ E_wo,d ≤ (1+ε)I` on a normalized family, as two minimum
/// eigenvalue checks with slack [`ORDER_SLACK`]. `lhs` is `‖E_wo,d − I‖`.
pub fn check_sandwich(fam: &OperatorFamily, d: usize) -> Result<SymReport, SymError> {
    fam.require_normalized()?;
    let wo = e_wo(fam, d)?;
    let m = fam.m();
    let eps = epsilon(fam.c(), fam.n(), d);
    let mut lower = wo.clone();
    lower -= &Matrix::identity(m).scale_real(1.0 - eps);
    let mut upper = Matrix::identity(m).scale_real(1.0 + eps);
    upper -= &wo;
    let lo = min_eig_hermitian(&lower)?;
    let hi = min_eig_hermitian(&upper)?;
    let mut dev = wo;
    dev -= &Matrix::identity(m);
    Ok(SymReport {
        d,
        lhs: norm(&dev)?,
        rhs: eps,
        epsilon: eps,
        passed: lo >= -ORDER_SLACK && hi >= -ORDER_SLACK,
        lower_margin: Some(lo),
        upper_margin: Some(hi),
        detail: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{random_normalized_family, scalar_family, unitary_family, Side};
    use super::*;
    use crate::linalg::substream;

    #[test]
    fn unitary_families_pass_trivially() {
        let mut rng = substream(1, 0);
        let fam = unitary_family(3, 2, Side::Left, &mut rng);
        for d in 1..=3 {
            let r = check_theorem_bound(&fam, d).unwrap();
            assert!(r.lhs < 1e-13 && r.passed);
            assert!(check_sandwich(&fam, d).unwrap().passed);
        }
        assert!((bound_partition_sum(&fam, &Partition::coarsest(2)).unwrap() - 3.0).abs() < 1e-12);
        assert!((bound_partition_sum(&fam, &Partition::finest(3)).unwrap() - 27.0).abs() < 1e-12);
    }

    #[test]
    fn degree_one_is_exact() {
        let mut rng = substream(2, 0);
        let fam = random_normalized_family(5, 3, Side::Left, &mut rng).unwrap();
        let r = check_theorem_bound(&fam, 1).unwrap();
        assert_eq!(r.rhs, 0.0);
        assert!(r.lhs < 1e-12 && r.passed);
        let s = check_sandwich(&fam, 1).unwrap();
        assert!(s.passed && s.epsilon == 0.0);
    }

    #[test]
    fn unnormalized_families_are_rejected() {
        let fam = scalar_family(&[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            check_sandwich(&fam, 2),
            Err(SymError::NotNormalized { .. })
        ));
        assert!(bound_partition_sum(&fam, &Partition::finest(2)).is_err());
    }

    #[test]
    fn breakdown_lists_every_partition() {
        let mut rng = substream(3, 0);
        let fam = random_normalized_family(4, 2, Side::Left, &mut rng).unwrap();
        let r = check_theorem_bound_with(&fam, 3, true).unwrap();
        assert_eq!(r.detail.len(), 5);
        for p in &r.detail {
            assert_eq!(p.one_block_bound.is_some(), p.nu == 1);
            if p.nu >= 2 {
                assert!(p.measured <= p.bound + 1e-9);
            }
        }
    }
}
