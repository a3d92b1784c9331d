//! Symbolic integration used by the reconstruction pipelines: definite
//! λ-integrals over the homotopy interval and single-variable
//! antiderivatives on the lattice.

mod lambda;
mod single;

pub use lambda::integrate_lambda_01;
pub use single::integrate_in_var;
