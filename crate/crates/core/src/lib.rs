//! Discrete Yano rough Laplacian on closed surfaces: mesh generation, operator
//! assembly, sparse eigensolvers and the theorem checks.

pub mod discretization;
pub mod error;
pub mod field;
pub mod inner;
pub mod io;
pub mod ldlt;
pub mod manifold;
pub mod mesh;
pub mod models;
pub mod operator;
pub mod sparse;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Basis, FieldVector, MeshShape};
pub use inner::{flat, global_inner, pointwise_norms, sharp, InnerProductSpace};
pub use manifold::{ManifoldDescriptor, ManifoldKind};
pub use mesh::IntrinsicMesh;
pub use operator::OperatorPair;
