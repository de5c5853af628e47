//! Whitney-form discretization of the de Rham complex on a closed surface.
//!
//! Cochains: vertex values (0-forms), edge integrals along the canonical
//! `lo -> hi` orientation (1-forms), face integrals (2-forms). The 1-form mass
//! matrix is the Galerkin Whitney mass; 0-forms use the barycentric lumped mass
//! so that the codifferential stays sparse.

use rayon::prelude::*;

use super::geometry::{FaceGeometry, MeshGeometry};
use crate::error::Result;
use crate::field::Basis;
use crate::mesh::IntrinsicMesh;
use crate::operator::OperatorPair;
use crate::sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Clone)]
pub struct DecComplex {
    /// lumped vertex areas (diagonal of M0)
    pub m0: Vec<f64>,
    pub m1: CsrMatrix,
    /// 1/area per face (diagonal of M2)
    pub m2: Vec<f64>,
    pub d0: CsrMatrix,
    pub d1: CsrMatrix,
    /// Galerkin Hodge Laplacian on 1-forms: `M1 d0 M0⁻¹ d0ᵀ M1 + d1ᵀ M2 d1`.
    pub hodge_l1: OperatorPair,
    /// cotangent Laplacian `d0ᵀ M1 d0` with lumped mass
    pub laplace0: OperatorPair,
}

/// Exterior derivative on 0-forms: `(d0 f)_e = f_hi − f_lo`.
pub fn d0_matrix(mesh: &IntrinsicMesh) -> CsrMatrix {
    let mut b = TripletBuilder::with_capacity(mesh.n_edges(), mesh.n_vertices(), 2 * mesh.n_edges());
    for (e, &[lo, hi]) in mesh.edges().iter().enumerate() {
        b.push(e, lo, -1.0);
        b.push(e, hi, 1.0);
    }
    b.build()
}

/// Exterior derivative on 1-forms (signed face boundary).
pub fn d1_matrix(mesh: &IntrinsicMesh) -> CsrMatrix {
    let mut b = TripletBuilder::with_capacity(mesh.n_faces(), mesh.n_edges(), 3 * mesh.n_faces());
    for (f, (fe, fs)) in mesh.face_edges().iter().zip(mesh.face_edge_signs()).enumerate() {
        for c in 0..3 {
            b.push(f, fe[c], fs[c] as f64);
        }
    }
    b.build()
}

/// Local Whitney mass for the face edges `c -> c+1` (local orientation).
pub fn whitney_local_mass(g: &FaceGeometry) -> [[f64; 3]; 3] {
    let area = g.area;
    let int = |i: usize, j: usize| if i == j { area / 6.0 } else { area / 12.0 };
    let ends = [(0usize, 1usize), (1, 2), (2, 0)];
    let mut m = [[0.0; 3]; 3];
    for (p, &(a, b)) in ends.iter().enumerate() {
        for (q, &(c, d)) in ends.iter().enumerate() {
            m[p][q] = g.grad_dot(b, d) * int(a, c) - g.grad_dot(b, c) * int(a, d) - g.grad_dot(a, d) * int(b, c)
                + g.grad_dot(a, c) * int(b, d);
        }
    }
    m
}

impl DecComplex {
    pub fn assemble(mesh: &IntrinsicMesh, geom: &MeshGeometry) -> Result<Self> {
        let ne = mesh.n_edges();
        let d0 = d0_matrix(mesh);
        let d1 = d1_matrix(mesh);
        let m0 = geom.vertex_area.clone();
        let m2: Vec<f64> = geom.faces.iter().map(|g| 1.0 / g.area).collect();

        let locals: Vec<[[f64; 3]; 3]> = geom.faces.par_iter().map(whitney_local_mass).collect();
        let mut b = TripletBuilder::with_capacity(ne, ne, 9 * mesh.n_faces());
        for (f, local) in locals.iter().enumerate() {
            let fe = mesh.face_edges()[f];
            let fs = mesh.face_edge_signs()[f];
            for p in 0..3 {
                for q in 0..3 {
                    b.push(fe[p], fe[q], fs[p] as f64 * fs[q] as f64 * local[p][q]);
                }
            }
        }
        let m1 = b.build();

        let inv_m0: Vec<f64> = m0.iter().map(|a| 1.0 / a).collect();
        let m1d0 = m1.matmul(&d0)?;
        let coexact_part = d1.transpose().matmul(&d1.scale_rows(&m2))?;
        let exact_part = m1d0.scale_cols(&inv_m0).matmul(&m1d0.transpose())?;
        let k1 = exact_part.add_scaled(&coexact_part, 1.0)?.symmetrized();
        let hodge_l1 = OperatorPair::new(k1, m1.clone(), Basis::WhitneyEdge, "dec-hodge-1")?;

        let l0 = d0.transpose().matmul(&m1d0)?.symmetrized();
        let laplace0 = OperatorPair::new(l0, CsrMatrix::diagonal(&m0), Basis::P1Function, "cotan-laplace-0")?;

        Ok(Self {
            m0,
            m1,
            m2,
            d0,
            d1,
            hodge_l1,
            laplace0,
        })
    }
}
