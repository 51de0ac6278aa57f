//! With/without-replacement operator means and their partition-indexed
//! bounds.
//!
//! For a family `A_1..A_n` the without-replacement mean of degree `d` is
//! the average over distinct index tuples of `A_{j1}*⋯A_{jd}* A_{jd}⋯A_{j1}`
//! and the with-replacement mean averages over all `n^d` tuples.

mod bounds;
mod deviation;
mod family;
mod sums;

pub use bounds::{
    bound_folded_sum, bound_partition_sum, check_sandwich, check_theorem_bound,
    check_theorem_bound_with, epsilon, partition_breakdown, PartitionDetail, SymReport,
    ORDER_SLACK,
};
pub use deviation::{
    deviation_experiment, loglog_slope, DeviationReport, FamilySampler, MomentEstimate,
    SamplerKind, MIN_TRIALS,
};
pub use family::{
    normalize_family, normalize_family_with_side, random_normalized_family, scalar_family,
    unitary_family, FamilyJson, OperatorFamily, Side, MIN_GRAM_EIGENVALUE, NORMALIZED_TOL,
};
pub use sums::{
    e_wo, e_wo_recursive, e_wr, e_wr_nested, folded_sum, folding_identity_residual, partition_sum,
    FOLD_TOL, MAX_ENUM_D, MAX_ENUM_N,
};

use crate::linalg::LinalgError;
use crate::partitions::PartitionError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("operator family is empty")]
    EmptyFamily,
    #[error("operator {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("operator {0} has a non-finite entry")]
    NonFinite(usize),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("degree {d} exceeds family size {n}: no distinct index tuples")]
    DegreeExceedsCount { d: usize, n: usize },
    #[error("exhaustive enumeration infeasible for n = {n}, d = {d} (limits n <= {MAX_ENUM_N}, d <= {MAX_ENUM_D})")]
    Infeasible { n: usize, d: usize },
    #[error("family is not normalized: ||(1/n) sum A*A - I|| = {residual:e}")]
    NotNormalized { residual: f64 },
    #[error("mean Gram matrix is singular: min eigenvalue {min_eigenvalue:e}")]
    SingularGram { min_eigenvalue: f64 },
    #[error("position 1 is a singleton of {0}; the folded sum needs it shared")]
    SingletonFirstPosition(String),
    #[error("folded sum of {partition} disagrees with its direct evaluation by {residual:e}")]
    FoldMismatch { partition: String, residual: f64 },
    #[error("{trials} trials requested, at least {min} required")]
    TooFewTrials { trials: usize, min: usize },
    #[error("degree {d} must satisfy 1 <= d <= n/4 with n = {n}")]
    DegreeTooLargeForDeviation { d: usize, n: usize },
    #[error("moment exponent p = {0} must be 1, 2 or 4")]
    MomentExponent(u32),
    #[error("family file: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}
