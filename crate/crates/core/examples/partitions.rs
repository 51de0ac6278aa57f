//! Set partitions of index positions: enumeration, kernels and refinement.

use symagm::partitions::{
    enumerate_partitions, falling_factorial, kernel_of_tuple, refinement_leq, tuples_with_kernel,
    Partition,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for d in 1..=6 {
        println!("d = {d}: {} partitions", enumerate_partitions(d)?.len());
    }

    let sigma = Partition::from_blocks(3, vec![vec![0, 2], vec![1]])?;
    println!("\nkernel {sigma} over 4 indices:");
    for t in tuples_with_kernel(4, &sigma) {
        print!(" {t:?}");
    }
    println!("\ncount = {} = 4·3", falling_factorial(4, sigma.nu()));

    let k = kernel_of_tuple(&[7, 2, 7, 2])?;
    println!("\nkernel of (7,2,7,2) = {k}");
    let finest = Partition::finest(4);
    println!("{k} <= finest: {}", refinement_leq(&k, &finest)?);
    println!("finest <= {k}: {}", refinement_leq(&finest, &k)?);
    if let Some(gamma) = k.delete_position(0) {
        println!("delete position 1: {gamma}");
    }
    Ok(())
}
