use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cvec;
use super::{IgmError, VectorFamily};
use crate::linalg::{complex_gaussian, substream, RngStream};

/// Which vectors to take from a Heisenberg-Weyl orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitVariant {
    /// `a_{p,q} = W_{p,q} h`, giving `σ = 1`, `μ = d`.
    RankOneFrame,
    /// `a_{p,q} = √d · W_{p,q} h`, giving `σ = d`, `μ = d²`.
    Projector,
}

/// Orbit `{W_{p,q} h : 0 ≤ p, q < d}` of a random fiducial with `‖h‖² = d`,
/// where `(W_{p,q} h)_j = ω^{q(j−p)} h_{j−p}` and `ω = e^{2πi/d}`.
pub fn gen_group_orbit(
    d: usize,
    variant: OrbitVariant,
    rng: &mut RngStream,
) -> Result<VectorFamily, IgmError> {
    if d < 2 {
        return Err(IgmError::DimensionTooSmall(d));
    }
    let mut h: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = (d as f64).sqrt() / norm;
    h.iter_mut().for_each(|z| *z *= scale);
    let extra = match variant {
        OrbitVariant::RankOneFrame => 1.0,
        OrbitVariant::Projector => (d as f64).sqrt(),
    };
    let mut vectors = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            vectors.push(
                (0..d)
                    .map(|j| {
                        let src = (j + d - p) % d;
                        let angle = 2.0 * PI * ((q * src) % d) as f64 / d as f64;
                        Complex64::from_polar(extra, angle) * h[src]
                    })
                    .collect(),
            );
        }
    }
    VectorFamily::new(vectors)
}

/// Unit-vector point sets whose second moment is `I/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    /// `m + 1` vertices of the regular simplex in `R^m`.
    Simplex(usize),
    /// `±e_i` in `R^m`.
    CrossPolytope(usize),
    /// The 12 vertices of the icosahedron in `R^3`.
    Icosahedron,
}

pub fn gen_spherical_design(kind: DesignKind) -> Result<VectorFamily, IgmError> {
    let points: Vec<Vec<f64>> = match kind {
        DesignKind::Simplex(m) => {
            if m < 2 {
                return Err(IgmError::DimensionTooSmall(m));
            }
            // Coordinates of e_i − 1/(m+1) in the Helmert basis of the
            // sum-zero hyperplane, rescaled to unit length.
            let scale = ((m + 1) as f64 / m as f64).sqrt();
            (0..=m)
                .map(|i| {
                    (1..=m)
                        .map(|k| {
                            let norm = ((k * (k + 1)) as f64).sqrt();
                            let entry = if i < k {
                                1.0
                            } else if i == k {
                                -(k as f64)
                            } else {
                                0.0
                            };
                            entry / norm * scale
                        })
                        .collect()
                })
                .collect()
        }
        DesignKind::CrossPolytope(m) => {
            if m < 2 {
                return Err(IgmError::DimensionTooSmall(m));
            }
            (0..2 * m)
                .map(|j| {
                    let mut v = vec![0.0; m];
                    v[j / 2] = if j % 2 == 0 { 1.0 } else { -1.0 };
                    v
                })
                .collect()
        }
        DesignKind::Icosahedron => {
            let g = (1.0 + 5f64.sqrt()) / 2.0;
            let r = (1.0 + g * g).sqrt();
            let mut pts = Vec::with_capacity(12);
            for shift in 0..3 {
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        let base = [0.0, s1 / r, s2 * g / r];
                        pts.push((0..3).map(|i| base[(i + shift) % 3]).collect());
                    }
                }
            }
            pts
        }
    };
    VectorFamily::from_real(&points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVector(#[serde(with = "cvec")] pub Vec<Complex64>);

/// Where an IGM run gets its data vectors.
///
/// JSON forms: `{"group_orbit": {"d": 4, "variant": "rank_one_frame"}}`,
/// `{"spherical_design": {"cross_polytope": 3}}`,
/// `{"spherical_design": "icosahedron"}`, `{"vectors": [[[1, 0], [0, 0]], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSpec {
    GroupOrbit { d: usize, variant: OrbitVariant },
    SphericalDesign(DesignKind),
    Vectors(Vec<ComplexVector>),
}

impl GeneratorSpec {
    /// Builds the family; an orbit fiducial comes from the last substream of
    /// `seed`, which no trial uses.
    pub fn build(&self, seed: u64) -> Result<VectorFamily, IgmError> {
        match self {
            GeneratorSpec::GroupOrbit { d, variant } => {
                gen_group_orbit(*d, *variant, &mut substream(seed, u64::MAX))
            }
            GeneratorSpec::SphericalDesign(kind) => gen_spherical_design(*kind),
            GeneratorSpec::Vectors(v) => VectorFamily::new(v.iter().map(|c| c.0.clone()).collect()),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = IgmError;

    /// `orbit:D`, `projector:D`, `simplex:M`, `cross:M` or `icosahedron`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || IgmError::UnknownGenerator(s.to_string());
        if s == "icosahedron" {
            return Ok(GeneratorSpec::SphericalDesign(DesignKind::Icosahedron));
        }
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = arg.trim().parse().map_err(|_| bad())?;
        Ok(match name {
            "orbit" => GeneratorSpec::GroupOrbit {
                d: k,
                variant: OrbitVariant::RankOneFrame,
            },
            "projector" => GeneratorSpec::GroupOrbit {
                d: k,
                variant: OrbitVariant::Projector,
            },
            "simplex" => GeneratorSpec::SphericalDesign(DesignKind::Simplex(k)),
            "cross" => GeneratorSpec::SphericalDesign(DesignKind::CrossPolytope(k)),
            _ => return Err(bad()),
        })
    }
}
