//! Description of the manifold an operator or report refers to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::IntrinsicMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldKind {
    AnalyticTorus,
    AnalyticSphere,
    Mesh,
}

#[derive(Debug, Clone)]
pub enum ManifoldData {
    /// row-major `n × n` lattice basis
    Lattice(Vec<f64>),
    Radius(f64),
    Mesh(Box<IntrinsicMesh>),
}

#[derive(Debug, Clone)]
pub struct ManifoldDescriptor {
    pub kind: ManifoldKind,
    pub dimension: usize,
    pub data: ManifoldData,
    /// free-form label, usually the generating recipe
    pub name: String,
}

/// Serializable summary used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSummary {
    pub name: String,
    pub kind: ManifoldKind,
    pub dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub faces: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_characteristic: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<f64>>,
}

impl ManifoldDescriptor {
    pub fn torus(lattice: Vec<f64>, dimension: usize) -> Result<Self> {
        check_dimension(dimension)?;
        if lattice.len() != dimension * dimension || lattice.iter().any(|x| !x.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "torus lattice needs {} finite entries, got {}",
                dimension * dimension,
                lattice.len()
            )));
        }
        if determinant(&lattice, dimension).abs() < 1e-300 {
            return Err(Error::OutOfRange("degenerate torus lattice".into()));
        }
        Ok(Self {
            kind: ManifoldKind::AnalyticTorus,
            dimension,
            data: ManifoldData::Lattice(lattice),
            name: format!("T^{dimension}"),
        })
    }

    pub fn sphere(radius: f64, dimension: usize) -> Result<Self> {
        check_dimension(dimension)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::OutOfRange(format!("sphere radius {radius}")));
        }
        Ok(Self {
            kind: ManifoldKind::AnalyticSphere,
            dimension,
            data: ManifoldData::Radius(radius),
            name: format!("S^{dimension}"),
        })
    }

    /// Wraps a mesh after validating it.
    pub fn mesh(mesh: IntrinsicMesh, name: impl Into<String>) -> Result<Self> {
        mesh.ensure_valid()?;
        Ok(Self {
            kind: ManifoldKind::Mesh,
            dimension: 2,
            data: ManifoldData::Mesh(Box::new(mesh)),
            name: name.into(),
        })
    }

    pub fn as_mesh(&self) -> Option<&IntrinsicMesh> {
        match &self.data {
            ManifoldData::Mesh(m) => Some(m),
            _ => None,
        }
    }

    pub fn summary(&self) -> ManifoldSummary {
        let mut s = ManifoldSummary {
            name: self.name.clone(),
            kind: self.kind,
            dimension: self.dimension,
            vertices: None,
            edges: None,
            faces: None,
            euler_characteristic: None,
            radius: None,
            lattice: None,
        };
        match &self.data {
            ManifoldData::Lattice(l) => s.lattice = Some(l.clone()),
            ManifoldData::Radius(r) => s.radius = Some(*r),
            ManifoldData::Mesh(m) => {
                s.vertices = Some(m.n_vertices());
                s.edges = Some(m.n_edges());
                s.faces = Some(m.n_faces());
                s.euler_characteristic = Some(m.euler_characteristic());
            }
        }
        s
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("manifold dimension {n} < 2")));
    }
    Ok(())
}

fn determinant(a: &[f64], n: usize) -> f64 {
    nalgebra::DMatrix::from_row_slice(n, n, a).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::gen_icosphere;

    #[test]
    fn constructors_enforce_invariants() {
        assert!(ManifoldDescriptor::sphere(1.0, 1).is_err());
        assert!(ManifoldDescriptor::sphere(-1.0, 3).is_err());
        assert!(ManifoldDescriptor::torus(vec![1.0, 0.0, 0.0, 1.0], 2).is_ok());
        assert!(ManifoldDescriptor::torus(vec![1.0, 2.0, 2.0, 4.0], 2).is_err());
        assert!(ManifoldDescriptor::torus(vec![1.0; 3], 2).is_err());
        let d = ManifoldDescriptor::mesh(gen_icosphere(1, 1.0).unwrap(), "icosphere:1").unwrap();
        assert_eq!(d.dimension, 2);
        assert_eq!(d.summary().euler_characteristic, Some(2));
    }
}
