//! Coefficient vectors tagged with the basis they live in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discrete function spaces used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// piecewise-linear functions, one value per vertex
    P1Function,
    /// Whitney 1-forms, one integral per edge
    WhitneyEdge,
    /// tangent vectors (or covectors) in per-vertex orthonormal frames, `2V` values
    VertexTangent,
    /// symmetric 2-tensors per face, `(xx, xy, yy)` in the face layout frame
    FaceSymTensor,
    /// 2-forms, one integral per face
    Face2Form,
    /// piecewise-constant functions, one value per face
    FaceScalar,
}

impl Basis {
    /// Number of coefficients for a mesh with the given element counts.
    pub fn dimension(self, shape: MeshShape) -> usize {
        match self {
            Basis::P1Function => shape.vertices,
            Basis::WhitneyEdge => shape.edges,
            Basis::VertexTangent => 2 * shape.vertices,
            Basis::FaceSymTensor => 3 * shape.faces,
            Basis::Face2Form | Basis::FaceScalar => shape.faces,
        }
    }

    /// Tensor order `p` used by the global product's `1/p!` factor.
    pub fn tensor_order(self) -> u32 {
        match self {
            Basis::P1Function | Basis::FaceScalar => 0,
            Basis::WhitneyEdge | Basis::VertexTangent => 1,
            Basis::FaceSymTensor | Basis::Face2Form => 2,
        }
    }
}

/// Element counts identifying the mesh a field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshShape {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

impl MeshShape {
    pub fn of(mesh: &crate::mesh::IntrinsicMesh) -> Self {
        Self {
            vertices: mesh.n_vertices(),
            edges: mesh.n_edges(),
            faces: mesh.n_faces(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    basis: Basis,
    shape: MeshShape,
    coeffs: Vec<f64>,
}

impl FieldVector {
    pub fn new(basis: Basis, shape: MeshShape, coeffs: Vec<f64>) -> Result<Self> {
        let expected = basis.dimension(shape);
        if coeffs.len() != expected {
            return Err(Error::Dimension(format!(
                "{basis:?} field needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Dimension(format!("non-finite coefficient at {i}")));
        }
        Ok(Self { basis, shape, coeffs })
    }

    pub fn zeros(basis: Basis, shape: MeshShape) -> Self {
        Self {
            basis,
            shape,
            coeffs: vec![0.0; basis.dimension(shape)],
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn shape(&self) -> MeshShape {
        self.shape
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Vector at vertex `v` of a vertex-tangent field.
    pub fn tangent_at(&self, v: usize) -> [f64; 2] {
        debug_assert_eq!(self.basis, Basis::VertexTangent);
        [self.coeffs[2 * v], self.coeffs[2 * v + 1]]
    }

    pub fn same_space(&self, other: &FieldVector) -> bool {
        self.basis == other.basis && self.shape == other.shape
    }

    /// `s * self + t * other`
    pub fn combine(&self, s: f64, other: &FieldVector, t: f64) -> Result<FieldVector> {
        if !self.same_space(other) {
            return Err(Error::Dimension("fields live in different spaces".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| s * a + t * b).collect();
        Ok(Self {
            basis: self.basis,
            shape: self.shape,
            coeffs,
        })
    }
}
