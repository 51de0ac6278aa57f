//! Second-moment certificates of the built-in vector families.

use symagm::igm::{gen_group_orbit, gen_spherical_design, DesignKind, OrbitVariant, VectorFamily};
use symagm::linalg::substream;

fn show(name: &str, f: &VectorFamily) {
    println!(
        "{name:<16} n = {:>3}  m = {}  σ = {:.6}  μ = {:.6}  residual {:.1e}",
        f.n(),
        f.m(),
        f.sigma(),
        f.mu(),
        f.isotropy_residual()
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = substream(9, 0);
    for d in [2, 4, 8] {
        show(
            &format!("orbit {d}"),
            &gen_group_orbit(d, OrbitVariant::RankOneFrame, &mut rng)?,
        );
        show(
            &format!("projector {d}"),
            &gen_group_orbit(d, OrbitVariant::Projector, &mut rng)?,
        );
    }
    for kind in [
        DesignKind::Simplex(2),
        DesignKind::Simplex(4),
        DesignKind::CrossPolytope(3),
        DesignKind::Icosahedron,
    ] {
        show(&format!("{kind:?}"), &gen_spherical_design(kind)?);
    }
    Ok(())
}
