//! Global and pointwise inner products, and the musical isomorphism between
//! 1-forms and tangent fields.
//!
//! Every space carries its `1/p!` factor inside the mass matrix, so the global
//! product is always the plain bilinear form `aᵀ M b`.

use crate::discretization::dec::DecComplex;
use crate::discretization::geometry::MeshGeometry;
use crate::discretization::resample::Resampler;
use crate::discretization::vector::tangent_mass;
use crate::error::{Error, Result};
use crate::field::{Basis, FieldVector, MeshShape};
use crate::mesh::IntrinsicMesh;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct InnerProductSpace {
    pub mass: CsrMatrix,
    pub basis: Basis,
    pub shape: MeshShape,
}

impl InnerProductSpace {
    pub fn new(mass: CsrMatrix, basis: Basis, shape: MeshShape) -> Result<Self> {
        let n = basis.dimension(shape);
        if mass.nrows() != n || mass.ncols() != n {
            return Err(Error::Dimension(format!(
                "{basis:?} space needs a {n}x{n} mass, got {}x{}",
                mass.nrows(),
                mass.ncols()
            )));
        }
        Ok(Self { mass, basis, shape })
    }

    /// Standard product for `basis` on an assembled mesh.
    pub fn for_basis(mesh: &IntrinsicMesh, geom: &MeshGeometry, dec: &DecComplex, basis: Basis) -> Result<Self> {
        let areas: Vec<f64> = geom.faces.iter().map(|g| g.area).collect();
        let mass = match basis {
            Basis::P1Function => CsrMatrix::diagonal(&dec.m0),
            Basis::WhitneyEdge => dec.m1.clone(),
            Basis::VertexTangent => tangent_mass(geom),
            // g(φ, φ) = xx² + 2xy² + yy², times ½ for p = 2
            Basis::FaceSymTensor => {
                CsrMatrix::diagonal(&areas.iter().flat_map(|&a| [0.5 * a, a, 0.5 * a]).collect::<Vec<_>>())
            }
            Basis::FaceScalar => CsrMatrix::diagonal(&areas),
            Basis::Face2Form => CsrMatrix::diagonal(&dec.m2),
        };
        Self::new(mass, basis, MeshShape::of(mesh))
    }

    /// Tensor order `p`.
    pub fn order(&self) -> u32 {
        self.basis.tensor_order()
    }

    /// The `1/p!` factor already folded into the mass.
    pub fn symmetric_factor(&self) -> f64 {
        match self.order() {
            2 => 0.5,
            _ => 1.0,
        }
    }

    fn check(&self, a: &FieldVector) -> Result<()> {
        if a.basis() != self.basis || a.shape() != self.shape {
            return Err(Error::Dimension(format!(
                "{:?} field with {} coefficients does not live in the {:?} space",
                a.basis(),
                a.len(),
                self.basis
            )));
        }
        Ok(())
    }

    pub fn norm(&self, a: &FieldVector) -> Result<f64> {
        Ok(global_inner(a, a, self)?.max(0.0).sqrt())
    }
}

/// `⟨a, b⟩ = aᵀ M b`.
pub fn global_inner(a: &FieldVector, b: &FieldVector, space: &InnerProductSpace) -> Result<f64> {
    space.check(a)?;
    space.check(b)?;
    Ok(space.mass.bilinear(a.coeffs(), b.coeffs()))
}

/// `ω ↦ ξ = ω^♯`. Vertex-tangent frames are orthonormal, so this is the
/// identity there; Whitney forms go through the resampler.
pub fn sharp(omega: &FieldVector, resampler: Option<&Resampler>) -> Result<FieldVector> {
    match omega.basis() {
        Basis::VertexTangent => Ok(omega.clone()),
        Basis::WhitneyEdge => resampler
            .ok_or_else(|| Error::Basis("sharp of a Whitney form needs a resampler".into()))?
            .to_vertex(omega),
        b => Err(Error::Basis(format!("sharp is defined on 1-forms, got {b:?}"))),
    }
}

/// `ξ ↦ ξ^♭`, landing in the basis `to`.
pub fn flat(xi: &FieldVector, to: Basis, resampler: Option<&Resampler>) -> Result<FieldVector> {
    if xi.basis() != Basis::VertexTangent {
        return Err(Error::Basis(format!("flat expects a vertex-tangent field, got {:?}", xi.basis())));
    }
    match to {
        Basis::VertexTangent => Ok(xi.clone()),
        Basis::WhitneyEdge => resampler
            .ok_or_else(|| Error::Basis("flat into Whitney forms needs a resampler".into()))?
            .to_edge(xi),
        b => Err(Error::Basis(format!("flat cannot produce {b:?}"))),
    }
}

/// `g(φ, φ)` per vertex or face, without the `1/p!` factor.
pub fn pointwise_norms(phi: &FieldVector) -> Result<Vec<f64>> {
    let c = phi.coeffs();
    match phi.basis() {
        Basis::P1Function | Basis::FaceScalar => Ok(c.iter().map(|v| v * v).collect()),
        Basis::VertexTangent => Ok(c.chunks_exact(2).map(|v| v[0] * v[0] + v[1] * v[1]).collect()),
        Basis::FaceSymTensor => Ok(crate::discretization::tensor::tensor_norms(c)),
        b => Err(Error::Basis(format!("no pointwise norm for {b:?}"))),
    }
}
