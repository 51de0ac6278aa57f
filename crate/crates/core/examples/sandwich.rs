//! Two-sided order check (1−ε)I ≤ E_wo,d ≤ (1+ε)I, on both sides.

use symagm::linalg::substream;
use symagm::symsum::{check_sandwich, random_normalized_family, unitary_family, Side};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = substream(3, 0);
    for side in [Side::Left, Side::Right] {
        let fam = random_normalized_family(5, 2, side, &mut rng)?;
        for d in 2..=4 {
            let r = check_sandwich(&fam, d)?;
            println!(
                "{side:?} d = {d}: ε = {:.3}  lower {:+.4}  upper {:+.4}  passed {}",
                r.epsilon,
                r.lower_margin.unwrap_or(f64::NAN),
                r.upper_margin.unwrap_or(f64::NAN),
                r.passed
            );
        }
    }
    // Unitaries have C = 1 and E_wo,d = I exactly.
    let u = unitary_family(4, 3, Side::Left, &mut rng);
    println!(
        "unitary d = 3: ‖E_wo − I‖ = {:.2e}",
        check_sandwich(&u, 3)?.lhs
    );
    Ok(())
}
