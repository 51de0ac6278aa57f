//! ‖I − E_wo,d‖ against (1+C)/n · d(d−1)/2 with the per-partition breakdown.

use symagm::linalg::substream;
use symagm::symsum::{check_theorem_bound_with, random_normalized_family, Side};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fam = random_normalized_family(6, 3, Side::Left, &mut substream(2, 0))?;
    for d in 1..=4 {
        let r = check_theorem_bound_with(&fam, d, d == 3)?;
        println!(
            "d = {d}: lhs {:.4}  rhs {:.4}  passed {}",
            r.lhs, r.rhs, r.passed
        );
        for p in &r.detail {
            let one = p
                .one_block_bound
                .map_or(String::new(), |b| format!("  (C^d = {b:.3})"));
            println!(
                "    {:<14} ν = {}  ‖[σ]‖ = {:>9.3}  bound {:>9.3}{one}",
                p.partition, p.nu, p.measured, p.bound
            );
        }
    }
    Ok(())
}
