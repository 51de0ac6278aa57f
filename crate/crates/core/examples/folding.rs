use symagm::linalg::{spectral_norm, substream, SPECTRAL_REL_TOL};
use symagm::partitions::enumerate_partitions;
use symagm::symsum::{
    bound_folded_sum, folded_sum, folding_identity_residual, random_normalized_family, Side,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fam = random_normalized_family(5, 2, Side::Left, &mut substream(4, 0))?;
    println!(
        "Σ A*(1 − A*A)A identity residual: {:.2e}",
        folding_identity_residual(fam.ops())
    );
    for sigma in enumerate_partitions(4)? {
        if sigma.is_singleton(0) {
            continue;
        }
        let f = folded_sum(&fam, &sigma)?;
        let norm = spectral_norm(&f, SPECTRAL_REL_TOL)?.value;
        println!(
            "{:<14} ‖[[σ]]‖ = {norm:>8.3}  bound {:>8.3}",
            sigma.to_string(),
            bound_folded_sum(&fam, &sigma)?
        );
    }
    Ok(())
}
