//! Reconstruction of conservation laws from their roots.
//!
//! For an ordinary difference equation, the root of a first integral pins the
//! integral's dependence on the top point; integrating it and solving a
//! one-dimensional determining cascade recovers the integral itself. For a
//! partial difference equation in Kovalevskaya form, a homotopy integral in
//! the solved-point slots recovers the part of the density that depends on
//! the equation, and a differential-elimination cascade over a user-supplied
//! ansatz completes the density pair.

mod ode;
mod pde;

pub use ode::{
    is_first_integral, ode_characteristic, ode_root, reconstruct_ode_first_integral, OdeEquation,
};
pub use pde::{
    characteristic_from_partial, complete_densities, reconstruct_f_dependence, AnsatzSpec,
};
