//! The random-matrix model approaches freeness as the dimension grows.

use symagm::freeprobe::{counterexample_sweep, make_free_family, FreeError};
use symagm::linalg::substream;

fn mean_gap(dim: usize) -> f64 {
    let rows = counterexample_sweep(dim, 3, 1.2, 6, 21).unwrap();
    rows.iter().map(|r| r.trace_gap).sum::<f64>() / rows.len() as f64
}

#[test]
fn trace_gap_shrinks_with_dimension() {
    let (small, large) = (mean_gap(8), mean_gap(32));
    assert!(large < small, "dim 8: {small:.3e}, dim 32: {large:.3e}");
}

#[test]
fn model_moments_and_rejection() {
    let fam = make_free_family(16, 3, 1.2, &mut substream(22, 0)).unwrap();
    let (t1, t2) = fam.moment_residuals();
    assert!(t1 <= 1e-12 && t2 <= 1e-12);
    assert_eq!(fam.draws().len(), 3);
    assert!(matches!(
        make_free_family(16, 1, 1.2, &mut substream(22, 1)),
        Err(FreeError::TooFewUnitaries { .. })
    ));
}

#[test]
fn sweep_rows_follow_seed_order() {
    let rows = counterexample_sweep(8, 3, 1.2, 4, 23).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.seed).collect::<Vec<_>>(),
        vec![0, 1, 2, 3]
    );
    assert!(rows.iter().all(|r| r.identity_residual <= 1e-12));
}
