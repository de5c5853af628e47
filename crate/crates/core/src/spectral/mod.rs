//! Generalized symmetric eigensolvers, Hodge decomposition and the coclosed
//! spectrum.

pub mod eigen;
pub mod hodge;

pub use eigen::{
    cluster, default_gap_tol, eig_lowest, eig_with, Constraint, EigenPair, Ordering, SolveMethod, SolverOptions, SpectrumResult,
    DEFAULT_TOL,
};
pub use hodge::{coclosed_spectrum, hodge_decompose, CoclosedProjector, HodgeParts};
