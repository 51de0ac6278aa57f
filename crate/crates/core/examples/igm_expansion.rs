//! The direct recursion against its expanded product form, and the scalar
//! closed form (1 − γμ)^{2k} η.

use num_complex::Complex64;
use symagm::igm::{
    c_kl, c_kl_estimate, draw_indices, draw_noise, error_expansion_check, gen_spherical_design,
    monte_carlo_mse, DesignKind, IgmConfig, Policy, VectorFamily,
};
use symagm::linalg::substream;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vecs = gen_spherical_design(DesignKind::Icosahedron)?;
    let cfg = IgmConfig {
        gamma: 0.8,
        rho: 0.3,
        k: 8,
        policy: Policy::WithoutReplacement,
        trials: 1,
        seed: 0,
        x_star: vec![c(1.0), c(0.0), c(-1.0)],
        x_0: vec![c(0.0); 3],
    };
    let mut rng = substream(8, 0);
    let noise = draw_noise(&vecs, cfg.rho, &mut rng);
    let idx = draw_indices(cfg.policy, vecs.n(), cfg.k, &mut rng)?;
    println!(
        "indices {idx:?}, expansion residual {:.2e}",
        error_expansion_check(&vecs, &cfg, &idx, &noise)?
    );

    let scalar = VectorFamily::from_real(&[vec![1.5]])?;
    let cfg = IgmConfig {
        gamma: 0.2,
        rho: 0.0,
        k: 6,
        trials: 10,
        policy: Policy::WithReplacement,
        x_star: vec![c(0.0)],
        x_0: vec![c(2.0)],
        ..cfg
    };
    let stats = monte_carlo_mse(&scalar, &cfg)?;
    for (k, m) in stats.mean_mse.iter().enumerate() {
        let want = (1.0f64 - 0.2 * 2.25).powi(2 * k as i32) * 4.0;
        println!("k = {k}: {m:.15} closed form {want:.15}");
    }

    println!("\nC(k,l) for n = 20, k = 6 against exp(l(k−l)/(n−k)):");
    for l in 0..=6 {
        println!(
            "  l = {l}: {:.5} <= {:.5}",
            c_kl(20, 6, l)?,
            c_kl_estimate(20, 6, l)?
        );
    }
    Ok(())
}
