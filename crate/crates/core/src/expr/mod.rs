//! Expression trees over a two-dimensional integer lattice.
//!
//! Nodes cover exact rational constants, the lattice coordinates `m`/`n`,
//! continuous parameters, lattice variables `u[i,j]` and residual placeholders
//! `D[i,j]`, sums, products, integer powers, fractional powers (the square-root
//! family used by the ordinary-difference-equation subsystem), logarithms,
//! alternating signs `(-1)^(a·m+b·n+c)`, and rational-base powers with an
//! exponent linear in `m,n` (e.g. `2^(2-n)`).
//!
//! Every constructor normalizes: sums and products are flattened and sorted,
//! rational constants folded, like terms collected, like factors merged into
//! powers, and sign/power factors fused. Expressions are therefore in a
//! canonical (light) normal form at all times, and structural equality is
//! meaningful for syntactically identical values. Semantic equality is decided
//! by [`is_zero`](zero::is_zero) on a difference, never structurally.

mod algebra;
mod eval;
pub mod fixed;
mod node;
mod parse;
mod print;
pub mod zero;

pub use algebra::{
    differentiate, differentiate_sym, expand, ode_shift, shift, substitute, substitute_map,
    substitute_sym, substitute_where,
};
pub use eval::{evaluate, EvalPoint, Value};
pub use node::{Expr, Family, LatticeVar, PowLin, Symbol};
pub use parse::parse;
pub use zero::{
    dependencies, depends_on, depends_on_sym, exprs_equal, is_zero, PointSampler, ZeroTestConfig,
};
