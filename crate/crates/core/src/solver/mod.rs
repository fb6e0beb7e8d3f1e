//! Compressive-sensing reconstruction: a DCT sparsifying basis, matrix-free
//! sensing operators, and an SPGL1-style basis-pursuit solver.

mod cs;
mod dct;
mod l1;
mod operator;
mod spgl1;

pub use cs::{cs_reconstruct, measurement_count, CsReconstruction};
pub use dct::{dct_forward, dct_inverse, Dct};
pub use l1::project_l1_ball;
pub use operator::{adjoint_mismatch, DenseMatrix, LinearOperator, SensingOperator, Sparsifier};
pub use spgl1::{basis_pursuit, SolverOptions, SolverResult, SolverStatus};
