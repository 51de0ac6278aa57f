//! Without-replacement IGM on a Heisenberg-Weyl orbit against the bound,
//! with-replacement alongside.

use num_complex::Complex64;
use symagm::igm::{gen_group_orbit, monte_carlo_mse, IgmConfig, OrbitVariant, Policy};
use symagm::linalg::substream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = 4;
    let vecs = gen_group_orbit(d, OrbitVariant::RankOneFrame, &mut substream(7, 0))?;
    let mut x_star = vec![Complex64::new(0.0, 0.0); d];
    x_star[0] = Complex64::new(1.0, 0.0);
    let cfg = IgmConfig {
        gamma: 0.25,
        rho: 0.5,
        k: 8,
        policy: Policy::WithoutReplacement,
        trials: 4000,
        seed: 7,
        x_star,
        x_0: vec![Complex64::new(0.0, 0.0); d],
    };
    let wo = monte_carlo_mse(&vecs, &cfg)?;
    let wr = monte_carlo_mse(
        &vecs,
        &IgmConfig {
            policy: Policy::WithReplacement,
            ..cfg.clone()
        },
    )?;
    println!("φ = {:.4}, C1 = {:?}, η = {}", wo.phi, wo.c1, wo.eta);
    println!("{:>3} {:>10} {:>10} {:>10}", "k", "wo", "wr", "bound");
    for k in 0..=cfg.k {
        let b = wo.bound[k].map_or("-".to_string(), |b| format!("{b:.4}"));
        println!(
            "{k:>3} {:>10.5} {:>10.5} {b:>10}",
            wo.mean_mse[k], wr.mean_mse[k]
        );
    }
    println!("envelope holds at 3σ: {}", wo.envelope_holds(3.0));
    Ok(())
}
