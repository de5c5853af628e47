//! Operators on vertex-tangent fields: Bochner (connection) Laplacian, Ricci
//! multiplication, and their combinations Δ_sym = ∇*∇ − Ric and
//! Δ = ∇*∇ + Ric.

use rayon::prelude::*;

use super::connection::{rotation_block, ConnectionData};
use super::curvature::CurvatureField;
use super::geometry::MeshGeometry;
use crate::error::Result;
use crate::field::Basis;
use crate::mesh::IntrinsicMesh;
use crate::operator::OperatorPair;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Lumped vertex-tangent mass: `A_v` on both components of vertex `v`.
pub fn tangent_mass(geom: &MeshGeometry) -> CsrMatrix {
    let d: Vec<f64> = geom.vertex_area.iter().flat_map(|&a| [a, a]).collect();
    CsrMatrix::diagonal(&d)
}

/// Connection Laplacian: `ξᵀKξ = Σ_e w_e |ξ_hi − R_e ξ_lo|²` with cotangent
/// weights and `R_e` the transport rotation along the edge.
pub fn assemble_bochner(mesh: &IntrinsicMesh, geom: &MeshGeometry, conn: &ConnectionData) -> Result<OperatorPair> {
    let w = geom.cotan_weights(mesh);
    let blocks: Vec<(usize, usize, f64, [[f64; 2]; 2])> = mesh
        .edges()
        .par_iter()
        .enumerate()
        .map(|(e, &[lo, hi])| (lo, hi, w[e], rotation_block(conn.edge_transport[e])))
        .collect();
    let n = 2 * mesh.n_vertices();
    let mut b = TripletBuilder::with_capacity(n, n, 16 * blocks.len());
    for (lo, hi, we, r) in blocks {
        let ident = [[we, 0.0], [0.0, we]];
        b.push_block2(lo, lo, ident);
        b.push_block2(hi, hi, ident);
        // -w R couples lo into hi, its transpose hi into lo
        b.push_block2(hi, lo, [[-we * r[0][0], -we * r[0][1]], [-we * r[1][0], -we * r[1][1]]]);
        b.push_block2(lo, hi, [[-we * r[0][0], -we * r[1][0]], [-we * r[0][1], -we * r[1][1]]]);
    }
    OperatorPair::new(b.build(), tangent_mass(geom), Basis::VertexTangent, "bochner")
}

/// Vertexwise multiplication by `K_v`, mass-weighted: block `K_v A_v I`, which
/// is the angle defect times the identity.
pub fn assemble_ric(geom: &MeshGeometry, curv: &CurvatureField) -> Result<OperatorPair> {
    let d: Vec<f64> = curv
        .gaussian
        .iter()
        .zip(&curv.lumped_area)
        .flat_map(|(k, a)| [k * a, k * a])
        .collect();
    OperatorPair::new(CsrMatrix::diagonal(&d), tangent_mass(geom), Basis::VertexTangent, "ric")
}

/// The Yano rough Laplacian `∇*∇ − Ric`.
pub fn assemble_yano(bochner: &OperatorPair, ric: &OperatorPair) -> Result<OperatorPair> {
    let k = bochner.stiffness.add_scaled(&ric.stiffness, -1.0)?;
    bochner.with_stiffness(k, "yano")
}

/// The Hodge Laplacian on the vertex backend, `∇*∇ + Ric`.
pub fn assemble_hodge_vec(bochner: &OperatorPair, ric: &OperatorPair) -> Result<OperatorPair> {
    let k = bochner.stiffness.add_scaled(&ric.stiffness, 1.0)?;
    bochner.with_stiffness(k, "hodge-vec")
}
