use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::hyperbolic::gen_hyperbolic_genus2;
use super::icosphere::gen_icosphere;
use super::torus::{gen_torus_grid, Lattice, UNIT_LATTICE};
use crate::error::{Error, Result};
use crate::mesh::IntrinsicMesh;

/// Edge budget shared by all generators.
pub const MAX_EDGES: usize = 200_000;

/// A mesh generator invocation, written as `kind:level[:param]`, e.g.
/// `torus-grid:64`, `icosphere:4:2.0`, `hyperbolic-genus2:4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum MeshRecipe {
    Icosphere { level: u32, radius: f64 },
    TorusGrid { m: usize, lattice: Lattice },
    HyperbolicGenus2 { depth: u32, scale: f64 },
}

impl MeshRecipe {
    pub fn edge_count(&self) -> usize {
        match *self {
            MeshRecipe::Icosphere { level, .. } => 30 * 4usize.pow(level.min(10)),
            MeshRecipe::TorusGrid { m, .. } => 3 * m * m,
            MeshRecipe::HyperbolicGenus2 { depth, .. } => 24 * 4usize.pow(depth.min(10)),
        }
    }

    /// The same recipe one refinement level down, if that level exists.
    pub fn coarser(&self) -> Option<MeshRecipe> {
        match *self {
            MeshRecipe::Icosphere { level, radius } if level >= 1 => Some(MeshRecipe::Icosphere {
                level: level - 1,
                radius,
            }),
            MeshRecipe::TorusGrid { m, lattice } if m >= 6 && m % 2 == 0 => {
                Some(MeshRecipe::TorusGrid { m: m / 2, lattice })
            }
            MeshRecipe::HyperbolicGenus2 { depth, scale } if depth > super::hyperbolic::MIN_DEPTH => {
                Some(MeshRecipe::HyperbolicGenus2 { depth: depth - 1, scale })
            }
            _ => None,
        }
    }

    /// True at or above the resolutions the default tolerances were measured
    /// on (icosphere level 4, torus grid 64, genus-2 depth 4).
    pub fn is_default_resolution(&self) -> bool {
        match *self {
            MeshRecipe::Icosphere { level, .. } => level >= 4,
            MeshRecipe::TorusGrid { m, .. } => m >= 64,
            MeshRecipe::HyperbolicGenus2 { depth, .. } => depth >= 4,
        }
    }

    pub fn build(&self) -> Result<IntrinsicMesh> {
        if self.edge_count() > MAX_EDGES {
            return Err(Error::OutOfRange(format!("{self} exceeds {MAX_EDGES} edges")));
        }
        match *self {
            MeshRecipe::Icosphere { level, radius } => gen_icosphere(level, radius),
            MeshRecipe::TorusGrid { m, lattice } => gen_torus_grid(m, lattice),
            MeshRecipe::HyperbolicGenus2 { depth, scale } => {
                let mesh = gen_hyperbolic_genus2(depth)?;
                Ok(if scale == 1.0 { mesh } else { mesh.scaled(scale) })
            }
        }
    }
}

impl fmt::Display for MeshRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshRecipe::Icosphere { level, radius } if *radius == 1.0 => write!(f, "icosphere:{level}"),
            MeshRecipe::Icosphere { level, radius } => write!(f, "icosphere:{level}:{radius}"),
            MeshRecipe::TorusGrid { m, lattice } if *lattice == UNIT_LATTICE => write!(f, "torus-grid:{m}"),
            MeshRecipe::TorusGrid { m, lattice } => write!(
                f,
                "torus-grid:{m}:{},{},{},{}",
                lattice[0][0], lattice[1][0], lattice[0][1], lattice[1][1]
            ),
            MeshRecipe::HyperbolicGenus2 { depth, scale } if *scale == 1.0 => write!(f, "hyperbolic-genus2:{depth}"),
            MeshRecipe::HyperbolicGenus2 { depth, scale } => write!(f, "hyperbolic-genus2:{depth}:{scale}"),
        }
    }
}

impl FromStr for MeshRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad mesh recipe `{s}`"));
        let mut parts = s.split(':');
        let kind = parts.next().ok_or_else(bad)?;
        let level = parts.next().ok_or_else(bad)?;
        let param = parts.next();
        if parts.next().is_some() {
            return Err(bad());
        }
        let real = |p: Option<&str>| -> Result<f64> {
            match p {
                None => Ok(1.0),
                Some(t) => t.parse().map_err(|_| bad()),
            }
        };
        match kind {
            "icosphere" => Ok(MeshRecipe::Icosphere {
                level: level.parse().map_err(|_| bad())?,
                radius: real(param)?,
            }),
            "torus-grid" => {
                let lattice = match param {
                    None => UNIT_LATTICE,
                    Some(p) => {
                        let v: Vec<f64> = p.split(',').map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
                        if v.len() != 4 {
                            return Err(bad());
                        }
                        // columns u = (v0, v1), v = (v2, v3)
                        [[v[0], v[2]], [v[1], v[3]]]
                    }
                };
                Ok(MeshRecipe::TorusGrid {
                    m: level.parse().map_err(|_| bad())?,
                    lattice,
                })
            }
            "hyperbolic-genus2" => Ok(MeshRecipe::HyperbolicGenus2 {
                depth: level.parse().map_err(|_| bad())?,
                scale: real(param)?,
            }),
            _ => Err(bad()),
        }
    }
}
