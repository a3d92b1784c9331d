//! Symbolic core for computing, verifying, and reconstructing conservation laws
//! of ordinary and partial difference equations.
//!
//! The toolkit works with expressions over a two-dimensional lattice: `u[i,j]`
//! denotes the dependent variable shifted `i` steps in `m` and `j` steps in `n`,
//! and `D[i,j]` denotes shifts of an equation residual (or, in restricted Euler
//! contexts, placeholder slots for the right-hand side of the equation).
//!
//! The main pipelines are:
//!
//! * [`claw`] — verify density pairs, compute the root of a conservation law,
//!   decide triviality and equivalence, recover characteristics, and run the
//!   discrete Noether construction;
//! * [`recon`] — reconstruct densities from a root (homotopy-style integral
//!   plus a determining-equation cascade), and first integrals of ordinary
//!   difference equations;
//! * [`gardner`] — generate an infinite hierarchy of conservation laws for the
//!   discrete potential KdV equation from a Gardner-type expansion;
//! * [`cosym`] — adjoint linearized-symmetry (cosymmetry) checks and the
//!   root-to-characteristic decision procedure.
//!
//! Everything is deterministic: probabilistic zero testing draws samples from a
//! seeded stream, exact rational arithmetic is used whenever an expression is
//! free of logarithms and fractional powers, and high-precision fixed-point
//! arithmetic (default 256 bits) is used otherwise.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod claw;
pub mod cosym;
pub mod equations;
pub mod error;
pub mod expr;
pub mod gardner;
pub mod integrate;
pub mod linalg;
pub mod ops;
pub mod recon;
pub mod series;

pub use error::Error;
pub use expr::{Expr, Family, LatticeVar, Symbol};
