//! Mesh generators and closed-form spectra of the model manifolds.

pub mod hyperbolic;
pub mod icosphere;
pub mod oracles;
pub mod recipe;
pub mod torus;

pub use hyperbolic::gen_hyperbolic_genus2;
pub use icosphere::gen_icosphere;
pub use oracles::{
    conformal_lambda, projective_lambda, projective_sign_oracle, sphere_oracle, torus_oracle, AnalyticEigenFamily,
    FamilyTag, Model,
};
pub use recipe::MeshRecipe;
pub use torus::{gen_torus_grid, Lattice, UNIT_LATTICE};
