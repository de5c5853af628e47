//! Discrete operators on intrinsic meshes: the Whitney de Rham complex and the
//! vertex-tangent connection backend.

pub mod connection;
pub mod curvature;
pub mod dec;
pub mod geometry;
pub mod resample;
pub mod sampling;
pub mod tensor;
pub mod vector;

pub use connection::ConnectionData;
pub use curvature::CurvatureField;
pub use dec::DecComplex;
pub use geometry::MeshGeometry;
pub use resample::Resampler;
pub use tensor::{quadratic_form_identity, QuadraticIdentity, SymGradient};
pub use vector::{assemble_bochner, assemble_hodge_vec, assemble_ric, assemble_yano};

use crate::error::Result;
use crate::mesh::{Diagnostics, IntrinsicMesh};
use crate::operator::OperatorPair;

pub fn validate_mesh(mesh: &IntrinsicMesh) -> Diagnostics {
    mesh.validate()
}

pub fn curvature(mesh: &IntrinsicMesh) -> CurvatureField {
    CurvatureField::from_mesh(mesh)
}

pub fn assemble_dec(mesh: &IntrinsicMesh) -> Result<DecComplex> {
    mesh.ensure_valid()?;
    DecComplex::assemble(mesh, &MeshGeometry::new(mesh))
}

pub fn build_connection(mesh: &IntrinsicMesh) -> Result<ConnectionData> {
    mesh.ensure_valid()?;
    ConnectionData::new(mesh, &MeshGeometry::new(mesh))
}

/// Every operator the verification suite needs, assembled once per mesh.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub mesh: IntrinsicMesh,
    pub geom: MeshGeometry,
    pub curv: CurvatureField,
    pub conn: ConnectionData,
    pub dec: DecComplex,
    pub bochner: OperatorPair,
    pub ric: OperatorPair,
    pub yano: OperatorPair,
    pub hodge_vec: OperatorPair,
    pub sym_grad: SymGradient,
}

impl Assembly {
    pub fn new(mesh: IntrinsicMesh) -> Result<Self> {
        mesh.ensure_valid()?;
        let geom = MeshGeometry::new(&mesh);
        let curv = CurvatureField::new(&geom);
        let conn = ConnectionData::new(&mesh, &geom)?;
        let dec = DecComplex::assemble(&mesh, &geom)?;
        let bochner = assemble_bochner(&mesh, &geom, &conn)?;
        let ric = assemble_ric(&geom, &curv)?;
        let yano = assemble_yano(&bochner, &ric)?;
        let hodge_vec = assemble_hodge_vec(&bochner, &ric)?;
        let sym_grad = SymGradient::new(&mesh, &geom, &conn);
        Ok(Self {
            mesh,
            geom,
            curv,
            conn,
            dec,
            bochner,
            ric,
            yano,
            hodge_vec,
            sym_grad,
        })
    }

    pub fn resampler(&self) -> Result<Resampler> {
        Resampler::new(&self.mesh, &self.conn, &self.dec.m1, &self.bochner)
    }
}
