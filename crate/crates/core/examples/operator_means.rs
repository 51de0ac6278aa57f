//! With- and without-replacement means of a random normalized family, and
//! the partition decomposition that links them.

use symagm::linalg::substream;
use symagm::linalg::Matrix;
use symagm::partitions::{enumerate_partitions, falling_factorial, Partition};
use symagm::symsum::{
    e_wo, e_wo_recursive, e_wr, e_wr_nested, partition_sum, random_normalized_family, Side,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, m, d) = (5, 3, 3);
    let fam = random_normalized_family(n, m, Side::Left, &mut substream(1, 0))?;
    println!("n = {n}, m = {m}, C = sup‖A*A‖ = {:.4}", fam.c());

    let wo = e_wo(&fam, d)?;
    let wr = e_wr(&fam, d)?;
    println!(
        "enumerative vs fast wo: {:.2e}",
        wo.max_abs_diff(&e_wo_recursive(&fam, d)?)
    );
    println!(
        "enumerative vs nested wr: {:.2e}",
        wr.max_abs_diff(&e_wr_nested(&fam, d)?)
    );

    // n^d E_wr = Σ over all partitions of [σ].
    let mut total = Matrix::zeros(m);
    for sigma in enumerate_partitions(d)? {
        total += &partition_sum(&fam, &sigma)?;
    }
    let scaled = wr.scale_real((n as f64).powi(d as i32));
    println!("n^d E_wr − Σ_σ [σ]: {:.2e}", scaled.max_abs_diff(&total));

    let finest = partition_sum(&fam, &Partition::finest(d))?;
    let scaled = wo.scale_real(falling_factorial(n, d) as f64);
    println!(
        "n!/(n−d)! E_wo − [finest]: {:.2e}",
        scaled.max_abs_diff(&finest)
    );
    Ok(())
}
