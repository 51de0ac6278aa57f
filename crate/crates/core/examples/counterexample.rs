//! Equal traces, broken order: E_wr,3 − E_wo,3 for a with nearly free Haar
//! conjugates has a negative eigenvalue.

use symagm::freeprobe::{analyze, counterexample_sweep, make_free_family};
use symagm::linalg::substream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fam = make_free_family(64, 3, 1.2, &mut substream(6, 0))?;
    let (t1, t2) = fam.moment_residuals();
    println!(
        "τ(a) residual {t1:.1e}, τ(a²) residual {t2:.1e}, redraws {:?}",
        fam.draws()
    );
    let row = analyze(&fam, 0)?;
    println!("{row:#?}");

    let rows = counterexample_sweep(32, 3, 1.2, 8, 6)?;
    let neg = rows.iter().filter(|r| r.lambda_min < 0.0).count();
    println!("dim 32: negative λ_min in {neg} of {}", rows.len());
    Ok(())
}
