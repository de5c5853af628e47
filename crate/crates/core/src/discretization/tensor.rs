//! Deformation tensor `δ*ω = ∇ω + ∇ωᵀ` and codifferential `δω = −div ξ` of
//! vertex-tangent fields, evaluated per face from the linear interpolant.

use super::connection::{rotation_block, ConnectionData};
use super::geometry::MeshGeometry;
use crate::error::{Error, Result};
use crate::field::{Basis, FieldVector, MeshShape};
use crate::mesh::IntrinsicMesh;
use crate::operator::OperatorPair;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Sparse maps from vertex-tangent coefficients to face quantities.
#[derive(Debug, Clone)]
pub struct SymGradient {
    /// `3F × 2V`: `(xx, xy, yy)` of `δ*ω` in each face layout frame
    pub dstar: CsrMatrix,
    /// `F × 2V`: `δω` per face
    pub codiff: CsrMatrix,
    /// diagonal of the `p = 2` product, `(½A, A, ½A)` per face
    pub tensor_mass: Vec<f64>,
    /// face areas, the `p = 0` product on face scalars
    pub scalar_mass: Vec<f64>,
    shape: MeshShape,
}

impl SymGradient {
    pub fn new(mesh: &IntrinsicMesh, geom: &MeshGeometry, conn: &ConnectionData) -> Self {
        let nf = mesh.n_faces();
        let nv2 = 2 * mesh.n_vertices();
        let mut ds = TripletBuilder::with_capacity(3 * nf, nv2, 24 * nf);
        let mut dv = TripletBuilder::with_capacity(nf, nv2, 6 * nf);
        for (f, t) in mesh.triangles().iter().enumerate() {
            let g = &geom.faces[f];
            for c in 0..3 {
                let r = rotation_block(conn.vertex_to_face[f][c]);
                let grad = g.grad_bary[c];
                for k in 0..2 {
                    // coefficient of ξ_k at this corner in J_ab = Σ (Rξ)_a ∂_b λ
                    let j = |a: usize, b: usize| r[a][k] * grad[b];
                    let col = 2 * t[c] + k;
                    ds.push(3 * f, col, 2.0 * j(0, 0));
                    ds.push(3 * f + 1, col, j(0, 1) + j(1, 0));
                    ds.push(3 * f + 2, col, 2.0 * j(1, 1));
                    dv.push(f, col, -(j(0, 0) + j(1, 1)));
                }
            }
        }
        let tensor_mass = geom.faces.iter().flat_map(|g| [0.5 * g.area, g.area, 0.5 * g.area]).collect();
        let scalar_mass = geom.faces.iter().map(|g| g.area).collect();
        Self {
            dstar: ds.build(),
            codiff: dv.build(),
            tensor_mass,
            scalar_mass,
            shape: MeshShape::of(mesh),
        }
    }

    fn check(&self, xi: &FieldVector) -> Result<()> {
        if xi.basis() != Basis::VertexTangent || xi.shape() != self.shape {
            return Err(Error::Basis(format!("expected a vertex-tangent field, got {:?}", xi.basis())));
        }
        Ok(())
    }

    /// `δ*ω` as a face-symtensor field.
    pub fn apply(&self, xi: &FieldVector) -> Result<FieldVector> {
        self.check(xi)?;
        FieldVector::new(Basis::FaceSymTensor, self.shape, self.dstar.mul_vec(xi.coeffs()))
    }

    /// `δω` as a face-scalar field.
    pub fn codifferential(&self, xi: &FieldVector) -> Result<FieldVector> {
        self.check(xi)?;
        FieldVector::new(Basis::FaceScalar, self.shape, self.codiff.mul_vec(xi.coeffs()))
    }

    /// Weak form of `δ*δ` on vertex-tangent fields: `⟨δω, δη⟩`.
    pub fn dstar_delta_weak(&self) -> Result<CsrMatrix> {
        let weighted = self.codiff.scale_rows(&self.scalar_mass);
        Ok(self.codiff.transpose().matmul(&weighted)?.symmetrized())
    }

    /// Weak form of `δδ*`: `⟨δ*ω, δ*η⟩` with the `½` of the `p = 2` product.
    pub fn delta_dstar_weak(&self) -> Result<CsrMatrix> {
        let weighted = self.dstar.scale_rows(&self.tensor_mass);
        Ok(self.dstar.transpose().matmul(&weighted)?.symmetrized())
    }
}

/// `g(φ, φ)` per face for a face-symtensor `(xx, xy, yy)`.
pub fn tensor_norms(phi: &[f64]) -> Vec<f64> {
    phi.chunks_exact(3)
        .map(|s| s[0] * s[0] + 2.0 * s[1] * s[1] + s[2] * s[2])
        .collect()
}

/// Both sides of `⟨Δ_sym ω, ω⟩ = ⟨δ*ω, δ*ω⟩ − ⟨δω, δω⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub sym_part: f64,
    pub div_part: f64,
}

impl QuadraticIdentity {
    /// `|lhs − rhs| / (|lhs| + |rhs| + ε)`
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / (self.lhs.abs() + self.rhs.abs() + f64::MIN_POSITIVE)
    }
}

/// Evaluates the identity for `ξ`, with `δ*` multiplied by `dstar_scale`
/// (1 for the calibrated operator).
pub fn quadratic_form_identity(
    yano: &OperatorPair,
    sg: &SymGradient,
    xi: &FieldVector,
    dstar_scale: f64,
) -> Result<QuadraticIdentity> {
    sg.check(xi)?;
    let x = xi.coeffs();
    let lhs = yano.stiffness.bilinear(x, x);
    let s = sg.dstar.mul_vec(x);
    let d = sg.codiff.mul_vec(x);
    let sym_part: f64 = s
        .iter()
        .zip(&sg.tensor_mass)
        .map(|(v, m)| m * (dstar_scale * v).powi(2))
        .sum();
    let div_part: f64 = d.iter().zip(&sg.scalar_mass).map(|(v, m)| m * v * v).sum();
    Ok(QuadraticIdentity {
        lhs,
        rhs: sym_part - div_part,
        sym_part,
        div_part,
    })
}

/// `|δ*ω|² − (4/n)(δω)²` per face with `n = 2`; never negative beyond
/// rounding.
pub fn trace_inequality_margins(sg: &SymGradient, xi: &FieldVector) -> Result<Vec<f64>> {
    let s = sg.apply(xi)?;
    let d = sg.codifferential(xi)?;
    Ok(tensor_norms(s.coeffs())
        .iter()
        .zip(d.coeffs())
        .map(|(n2, dv)| n2 - 2.0 * dv * dv)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{gen_icosphere, gen_torus_grid, UNIT_LATTICE};

    fn setup(mesh: &IntrinsicMesh) -> (MeshGeometry, ConnectionData) {
        let geom = MeshGeometry::new(mesh);
        let conn = ConnectionData::new(mesh, &geom).unwrap();
        (geom, conn)
    }

    #[test]
    fn parallel_field_on_flat_torus_has_no_deformation() {
        let mesh = gen_torus_grid(6, UNIT_LATTICE).unwrap();
        let (geom, conn) = setup(&mesh);
        let sg = SymGradient::new(&mesh, &geom, &conn);
        let xi = crate::discretization::sampling::transported_field(&mesh, &conn, 0, [0.3, -0.8]);
        let s = sg.apply(&xi).unwrap();
        assert!(s.coeffs().iter().all(|v| v.abs() < 1e-12));
        assert!(sg.codifferential(&xi).unwrap().coeffs().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn trace_inequality_on_random_fields() {
        let mesh = gen_icosphere(1, 1.0).unwrap();
        let (geom, conn) = setup(&mesh);
        let sg = SymGradient::new(&mesh, &geom, &conn);
        let mut state = 7u64;
        let coeffs: Vec<f64> = (0..2 * mesh.n_vertices())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let xi = FieldVector::new(Basis::VertexTangent, MeshShape::of(&mesh), coeffs).unwrap();
        for m in trace_inequality_margins(&sg, &xi).unwrap() {
            assert!(m >= -1e-12);
        }
    }
}
