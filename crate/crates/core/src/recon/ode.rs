//! First integrals of scalar ordinary difference equations.
//!
//! An equation of order `K` is written as `u[K] = γ(n, u[0], …, u[K−1])` with
//! `∂γ/∂u[0] ≠ 0`, so that it can be run in both directions. Points `u[i]`
//! are stored as the lattice variables `u[i,0]` and the single independent
//! variable is `n`; [`crate::expr::ode_shift`] advances both at once.
//!
//! A first integral is a function `φ(n, u[0..K−1])` with `S φ = φ` on all
//! solutions. Its characteristic is the difference quotient of `S φ` across
//! the equation, and its root is the limit of that quotient on solutions:
//! `∂(S φ)/∂u[K]` evaluated at `u[K] = γ`. The root determines the integral
//! up to an additive constant, and `reconstruct_ode_first_integral` realizes
//! that correspondence when the equation's inverse is available in closed
//! form.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::expr::{
    depends_on, differentiate, is_zero, ode_shift, substitute, substitute_sym, Expr, LatticeVar,
    Symbol, ZeroTestConfig,
};
use crate::linalg::solve_expr_rhs;

/// A scalar ordinary difference equation `u[K] = γ(n, u[0], …, u[K−1])`.
#[derive(Debug, Clone)]
pub struct OdeEquation {
    /// Order of the equation.
    pub k: i64,
    /// Right-hand side of the solved form, over `n` and `u[0..K−1]`.
    pub gamma: Expr,
    /// Optional closed-form inverse: `u[0]` in terms of `n`, `u[1..K−1]` and
    /// the placeholder symbol `w`, which stands for `u[K]`. Required by
    /// reconstruction, where the root's dependence on `u[0]` must be traded
    /// for dependence on the top point.
    pub inverse: Option<Expr>,
}

impl OdeEquation {
    /// Validates and builds the equation: `γ` may use only `n` and the data
    /// points `u[0..K−1]`, must genuinely involve `u[0]`, and the inverse (if
    /// given) must undo the solved form.
    pub fn new(
        k: i64,
        gamma: Expr,
        inverse: Option<Expr>,
        cfg: &ZeroTestConfig,
    ) -> Result<OdeEquation> {
        if k < 1 {
            return Err(Error::invalid("equation order must be at least 1"));
        }
        for v in gamma.lattice_vars() {
            if v.dn != 0 || v.dm < 0 || v.dm >= k {
                return Err(Error::invalid(
                    "gamma may only use the points u[0,0] … u[K-1,0]",
                ));
            }
        }
        if is_zero(&differentiate(&gamma, LatticeVar::u(0, 0)), cfg)? {
            return Err(Error::invalid(
                "gamma must depend on u[0,0]; otherwise the equation cannot be run backwards",
            ));
        }
        let eq = OdeEquation { k, gamma, inverse };
        if let Some(inv) = &eq.inverse {
            // Substituting w ↦ γ must reproduce u[0,0] identically.
            let w = Symbol::from_name("w");
            if !inv.symbols().contains(&w) {
                return Err(Error::invalid("the inverse must use the placeholder symbol w"));
            }
            let roundtrip = substitute_sym(inv, &w, &eq.gamma) - Expr::u(0, 0);
            if !is_zero(&roundtrip, cfg)? {
                return Err(Error::invalid("the inverse does not undo the solved form at u[0,0]"));
            }
        }
        Ok(eq)
    }

    /// The defining residual `u[K] − γ` over free variables.
    pub fn delta(&self) -> Expr {
        Expr::u(self.k, 0) - self.gamma.clone()
    }

    fn top(&self) -> LatticeVar {
        LatticeVar::u(self.k, 0)
    }
}

/// The root of a first integral: `∂(S φ)/∂u[K]` restricted to solutions.
pub fn ode_root(eq: &OdeEquation, phi: &Expr) -> Expr {
    let shifted = ode_shift(phi, 1);
    let d = differentiate(&shifted, eq.top());
    substitute(&d, eq.top(), &eq.gamma)
}

/// The characteristic of a first integral as a difference quotient: with
/// `Δ = u[K] − γ` written as the slack variable `D[0,0]`,
/// `Q(n, z, Δ) = ((S φ)|_{u[K]=Δ+γ} − (S φ)|_{u[K]=γ}) / Δ`.
///
/// No integration is involved; the root is the value of `Q` at `Δ = 0` (a
/// removable point of the quotient).
pub fn ode_characteristic(eq: &OdeEquation, phi: &Expr) -> Expr {
    let shifted = ode_shift(phi, 1);
    let delta = Expr::delta(0, 0);
    let plus = substitute(&shifted, eq.top(), &(delta.clone() + eq.gamma.clone()));
    let base = substitute(&shifted, eq.top(), &eq.gamma);
    (plus - base) * Expr::pow(delta, -1)
}

/// Whether `(S φ − φ)` vanishes on all solutions.
pub fn is_first_integral(eq: &OdeEquation, phi: &Expr, cfg: &ZeroTestConfig) -> Result<bool> {
    let shifted = ode_shift(phi, 1);
    let on = substitute(&shifted, eq.top(), &eq.gamma);
    is_zero(&(on - phi.clone()), cfg)
}

/// Reconstructs a first integral from its root.
///
/// The root `q̄(n, u[0..K−1])` equals `∂φ(n+1, u[1..K])/∂u[K]` evaluated on
/// solutions. Substituting the equation's inverse for `u[0]` undoes the
/// restriction; integrating in `u[K]` and shifting down recovers `φ` up to a
/// remainder `f(n, u[0..K−2])`, which is determined by a one-dimensional
/// elimination cascade on the on-solutions residual. Summation constants are
/// set to zero, so the result is canonical up to an additive constant.
pub fn reconstruct_ode_first_integral(
    eq: &OdeEquation,
    qbar: &Expr,
    cfg: &ZeroTestConfig,
) -> Result<Expr> {
    if is_zero(qbar, cfg)? {
        return Ok(Expr::int(0));
    }
    let inverse = eq.inverse.as_ref().ok_or_else(|| {
        Error::invalid("reconstruction needs the closed-form inverse of the solved form")
    })?;
    let w = Symbol::from_name("w");
    let inv = substitute_sym(inverse, &w, &Expr::u(eq.k, 0));
    // Off-solutions top-point derivative at level n+1.
    let qoff = substitute(qbar, LatticeVar::u(0, 0), &inv);
    let anti = super::pde::integrate_with_cleanup(&qoff, eq.top(), cfg)?;
    let mut phi = ode_shift(&anti, -1);

    // Remainder cascade: on solutions,
    //   0 = (S φ)|_{u[K]=γ} − φ + f(n+1, u[1..K−1]) − f(n, u[0..K−2]),
    // and each pass pins the shifted remainder's dependence on its top
    // argument, which only it contains.
    let mut top_arg = eq.k - 2; // highest argument of the unshifted remainder
    while top_arg >= 0 {
        let resid = on_residual(eq, &phi);
        let v = LatticeVar::u(top_arg + 1, 0); // top argument of the shifted remainder
        let dv = differentiate(&resid, v);
        if is_zero(&dv, cfg)? {
            top_arg -= 1;
            continue;
        }
        let mut det_shifted = super::pde::integrate_with_cleanup(&(Expr::int(-1) * dv), v, cfg)?;
        let keep: alloc::collections::BTreeSet<LatticeVar> =
            (1..=top_arg + 1).map(|i| LatticeVar::u(i, 0)).collect();
        if !super::pde::depends_within(&det_shifted, &keep, cfg)? {
            // Antiderivatives are only fixed up to a part free of the
            // integration point; re-anchor the free part there.
            let anchored = det_shifted.clone() - substitute(&det_shifted, v, &Expr::int(8191));
            if super::pde::depends_within(&anchored, &keep, cfg)? {
                det_shifted = anchored;
            }
        }
        let det_shifted = super::pde::strip_outside(&det_shifted, &keep, cfg)?;
        phi = phi + ode_shift(&det_shifted, -1);
        top_arg -= 1;
    }

    // Terminal step: the residual may only depend on n; absorb it with
    // f(n+1) − f(n) = −resid over a small polynomial-and-parity span.
    let resid = on_residual(eq, &phi);
    for v in resid.lattice_vars() {
        if depends_on(&resid, v, cfg)? {
            return Err(Error::inconsistent_root(
                "determining residual still involves lattice points; the root is not consistent",
            ));
        }
    }
    let resid = super::pde::strip_inert_vars(&resid, cfg)?;
    if !is_zero(&resid, cfg)? {
        phi = phi + solve_label_difference(&resid, cfg)?;
    }
    let phi = super::pde::strip_inert_vars(&phi, cfg)?;

    // The result must be a first integral with the requested root.
    if !is_first_integral(eq, &phi, cfg)? {
        return Err(Error::inconsistent_root(
            "reconstructed expression is not a first integral",
        ));
    }
    if !is_zero(&(ode_root(eq, &phi) - qbar.clone()), cfg)? {
        return Err(Error::inconsistent_root(
            "reconstructed first integral does not have the requested root",
        ));
    }
    Ok(phi)
}

fn on_residual(eq: &OdeEquation, phi: &Expr) -> Expr {
    let shifted = ode_shift(phi, 1);
    substitute(&shifted, eq.top(), &eq.gamma) - phi.clone()
}

/// Solves `f(n+1) − f(n) = −resid(n)` for `f` in the span
/// `{n, n², n³, (−1)^n, n(−1)^n}`, with free coefficients set to zero.
fn solve_label_difference(resid: &Expr, cfg: &ZeroTestConfig) -> Result<Expr> {
    let basis: Vec<Expr> = vec![
        Expr::n(),
        Expr::pow(Expr::n(), 2),
        Expr::pow(Expr::n(), 3),
        Expr::parity(0, 1, 0),
        Expr::n() * Expr::parity(0, 1, 0),
    ];
    let eval = |j: usize, t: i64| -> BigRational {
        let r = |x: i64| BigRational::from(BigInt::from(x));
        let sign = if t % 2 == 0 { 1 } else { -1 };
        match j {
            0 => r(t),
            1 => r(t * t),
            2 => r(t * t * t),
            3 => r(sign),
            _ => r(t * sign),
        }
    };
    let points: Vec<i64> = (-5..=6).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &t in &points {
        let row: Vec<BigRational> =
            (0..basis.len()).map(|j| eval(j, t + 1) - eval(j, t)).collect();
        a.push(row);
        b.push(Expr::int(-1) * at_label_n(resid, t));
    }
    match solve_expr_rhs(&a, &b, cfg)? {
        Some(coeffs) => {
            let mut f = Expr::int(0);
            for (c, phi) in coeffs.into_iter().zip(basis) {
                f = f + c * phi;
            }
            Ok(f)
        }
        None => Err(Error::inconsistent_root(
            "terminal summation residual lies outside the supported span of n",
        )),
    }
}

/// Substitutes a concrete integer for `n`, resolving parity and
/// linear-exponent powers to numbers while leaving parameters symbolic.
fn at_label_n(e: &Expr, t: i64) -> Expr {
    match e {
        Expr::Num(_) | Expr::Var(_) => e.clone(),
        Expr::Sym(Symbol::N) => Expr::int(t),
        Expr::Sym(_) => e.clone(),
        Expr::Parity(a, b, c) => {
            // The m-part must be absent for a pure-n label substitution.
            debug_assert_eq!(*a, 0, "parity with an m-part in an ordinary context");
            let exp = i64::from(*b) * t + i64::from(*c);
            Expr::int(if exp.rem_euclid(2) == 0 { 1 } else { -1 })
        }
        Expr::PowLin(p) => {
            debug_assert_eq!(p.a, 0, "linear-exponent power with an m-part in an ordinary context");
            Expr::num(rat_pow(&p.base, p.b * t + p.c))
        }
        Expr::Sum(ts) => Expr::add(ts.iter().map(|x| at_label_n(x, t)).collect()),
        Expr::Prod(fs) => Expr::mul(fs.iter().map(|x| at_label_n(x, t)).collect()),
        Expr::Pow(base, k) => Expr::pow(at_label_n(base, t), *k),
        Expr::Root(base, q) => Expr::root_pow(at_label_n(base, t), q.clone()),
        Expr::Ln(base) => Expr::ln(at_label_n(base, t)),
    }
}

fn rat_pow(q: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::from(BigInt::from(1));
    let base = if e >= 0 { q.clone() } else { q.recip() };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(src: &str) -> Expr {
        parse(src).expect("parse")
    }

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    /// u[2] = u[0] with integral u[0]·u[1]: root, characteristic, and
    /// round-trip reconstruction.
    #[test]
    fn swap_equation_round_trip() {
        let eq = OdeEquation::new(2, e("u[0,0]"), Some(e("w")), &cfg()).unwrap();
        let phi = e("u[0,0]*u[1,0]");
        assert!(is_first_integral(&eq, &phi, &cfg()).unwrap());
        let root = ode_root(&eq, &phi);
        assert!(is_zero(&(root.clone() - e("u[1,0]")), &cfg()).unwrap());
        let back = reconstruct_ode_first_integral(&eq, &root, &cfg()).unwrap();
        let diff = back - phi;
        // The difference must be constant: no lattice points, no n.
        assert!(diff_is_constant(&diff));
    }

    fn diff_is_constant(d: &Expr) -> bool {
        let cfg = cfg();
        for v in d.lattice_vars() {
            if depends_on(d, v, &cfg).unwrap() {
                return false;
            }
        }
        // A label-free quantity is invariant under the shift; n itself is not.
        is_zero(&(ode_shift(d, 1) - d.clone()), &cfg).unwrap()
    }

    /// A planted rational-γ equation derived from φ = a·u0·u1 + b·u0 + c·u1 + d·n.
    #[test]
    fn planted_rational_equation_round_trip() {
        // S φ = φ solved for u[2] with a=1, b=2, c=3, d=5.
        let gamma = e("(u[0,0]*u[1,0] + 2*u[0,0] + u[1,0] - 5)/(u[1,0] + 3)");
        let inverse = e("(w*(u[1,0]+3) - u[1,0] + 5)/(u[1,0] + 2)");
        let eq = OdeEquation::new(2, gamma, Some(inverse), &cfg()).unwrap();
        let phi = e("u[0,0]*u[1,0] + 2*u[0,0] + 3*u[1,0] + 5*n");
        assert!(is_first_integral(&eq, &phi, &cfg()).unwrap());
        let root = ode_root(&eq, &phi);
        let back = reconstruct_ode_first_integral(&eq, &root, &cfg()).unwrap();
        let diff = back - phi;
        assert!(diff_is_constant(&diff), "difference should be an additive constant: {diff}");
    }

    #[test]
    fn zero_root_yields_constant() {
        let eq = OdeEquation::new(2, e("u[0,0]"), Some(e("w")), &cfg()).unwrap();
        let phi = reconstruct_ode_first_integral(&eq, &Expr::int(0), &cfg()).unwrap();
        assert_eq!(phi, Expr::int(0));
    }

    #[test]
    fn parity_weighted_integral_round_trip() {
        // φ = (−1)^n (u1 − u0) is a first integral of u[2] = u[0].
        let eq = OdeEquation::new(2, e("u[0,0]"), Some(e("w")), &cfg()).unwrap();
        let phi = e("parity(0,1,0)*(u[1,0] - u[0,0])");
        assert!(is_first_integral(&eq, &phi, &cfg()).unwrap());
        let back = reconstruct_ode_first_integral(&eq, &ode_root(&eq, &phi), &cfg()).unwrap();
        let diff = back - phi;
        assert!(diff_is_constant(&diff), "difference should be constant: {diff}");
    }

    #[test]
    fn characteristic_is_difference_quotient() {
        let eq = OdeEquation::new(2, e("u[0,0]"), Some(e("w")), &cfg()).unwrap();
        let phi = e("u[0,0]*u[1,0]");
        // S φ = u1·u2; Q = ((u1(Δ+u0)) − u1·u0)/Δ = u1.
        let q = ode_characteristic(&eq, &phi);
        assert!(is_zero(&(q - e("u[1,0]")), &cfg()).unwrap());
    }
}
