//! Conservation laws of partial difference equations: verification, the
//! root of the characteristic, triviality and equivalence tests, recovery of
//! a characteristic from densities, and Noether's construction.
//!
//! A conservation law is a pair of densities `(F, G)` whose divergence
//! `(S_m−I)F + (S_n−I)G` vanishes on all solutions. Its *root* is the
//! variational derivative of the pulled-back divergence with respect to the
//! defining expression of the equation, restricted back to solutions — a
//! function of the initial data alone. The root is zero exactly for trivial
//! conservation laws, and two conservation laws are equivalent up to
//! trivial ones precisely when their roots agree up to a constant factor
//! and a lattice translation.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::equations::{pullback, pullback_with_delta, Equation};
use crate::error::{Error, Result};
use crate::expr::fixed::{rational_reconstruct, Fx};
use crate::expr::{
    evaluate, expand, is_zero, shift, substitute_where, Expr, Family, PointSampler, Symbol,
    Value, ZeroTestConfig,
};
use crate::integrate::integrate_lambda_01;
use crate::ops::{divergence, euler, euler_delta, euler_omega};

/// A conserved-density pair `(F, G)`; `F` is summed in the m-direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityPair {
    pub f: Expr,
    pub g: Expr,
}

impl DensityPair {
    pub fn new(f: Expr, g: Expr) -> DensityPair {
        DensityPair { f, g }
    }

    pub fn divergence(&self) -> Expr {
        divergence(&self.f, &self.g)
    }
}

/// The root of a conservation law's characteristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    /// Slot form: for equations in Kovalevskaya form, each placeholder
    /// `D[0,j]` stands for the j-th n-shift of the right-hand side ω (the
    /// value of the solved point). For quad-graph equations no placeholders
    /// occur and this coincides with `z`.
    pub slots: Expr,
    /// Fully substituted form: a function of the initial data only.
    pub z: Expr,
}

/// Outcome of comparing two conservation laws through their roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    /// `root_a = factor · S_m^a S_n^b root_b` with `shift = (a, b)`.
    Equivalent { factor: BigRational, shift: (i64, i64) },
    Distinct,
}

fn min_u_row(e: &Expr) -> Option<i64> {
    e.lattice_vars().iter().filter(|v| v.family == Family::U).map(|v| v.dm).min()
}

/// Shift an expression up in m until every lattice point sits on a
/// non-negative row (required before a Kovalevskaya pullback).
fn lift_to_rows(e: &Expr) -> Expr {
    match min_u_row(e) {
        Some(r) if r < 0 => shift(e, -r, 0),
        _ => e.clone(),
    }
}

/// Checks that `(F, G)` is a conservation law: the divergence
/// `(S_m−I)F + (S_n−I)G` vanishes identically once expressed in the
/// equation's initial data. Shifting the divergence in m first is harmless
/// (the shift is invertible on solutions) and makes density pairs that dip
/// below row zero verifiable for equations in Kovalevskaya form.
pub fn verify_claw(pair: &DensityPair, eq: &Equation, cfg: &ZeroTestConfig) -> Result<bool> {
    let mut d = pair.divergence();
    if matches!(eq, Equation::Kovalevskaya(_)) {
        d = lift_to_rows(&d);
    }
    let data = eq.default_data();
    let pb = pullback(&d, eq, &data)?;
    is_zero(&pb, cfg)
}

/// Computes the root of the conservation law `(F, G)`.
///
/// For an equation in Kovalevskaya form the root is obtained from `F` alone:
/// express `F` in the initial data, shift once in m, replace the resulting
/// row-K points by ω-slots, and apply the slot variational derivative
/// `Σ_j S_n^{−j} ∂/∂(slot j)`. For a quad-graph equation the divergence is
/// expanded off solutions, differentiated variationally with respect to the
/// defining expression, and restricted back to the initial-data cross.
pub fn root(pair: &DensityPair, eq: &Equation) -> Result<Root> {
    match eq {
        Equation::Kovalevskaya(kov) => {
            let data = eq.default_data();
            let f = lift_to_rows(&pair.f);
            let f_pb = pullback(&f, eq, &data)?;
            let smf = shift(&f_pb, 1, 0);
            let (k, sigma) = (kov.k, kov.sigma);
            let slotted = substitute_where(
                &smf,
                Family::U,
                &|dm, _| dm == k,
                &|_, dn| Expr::delta(0, dn - sigma),
            );
            let cols: Vec<i64> = slotted
                .lattice_vars()
                .iter()
                .filter(|v| v.family == Family::Delta)
                .map(|v| v.dn)
                .collect();
            let slots = match (cols.iter().min(), cols.iter().max()) {
                (Some(&jmin), Some(&jmax)) => {
                    let based = shift(&slotted, 0, -jmin);
                    euler_omega(&based, jmax - jmin)
                }
                _ => Expr::zero(),
            };
            let z = substitute_where(
                &slots,
                Family::Delta,
                &|_, _| true,
                &|_, dn| shift(&kov.omega, 0, dn),
            );
            Ok(Root { slots, z })
        }
        Equation::Quad(_) => {
            let data = eq.default_data();
            let c = pullback_with_delta(&pair.divergence(), eq, &data)?;
            let ed = euler_delta(&c);
            let on_solutions =
                substitute_where(&ed, Family::Delta, &|_, _| true, &|_, _| Expr::zero());
            let z = pullback(&on_solutions, eq, &data)?;
            Ok(Root { slots: z.clone(), z })
        }
    }
}

/// A conservation law is trivial (a combination of densities vanishing on
/// solutions and an identically conserved pair) exactly when its root
/// vanishes as a function of the initial data.
pub fn is_trivial(pair: &DensityPair, eq: &Equation, cfg: &ZeroTestConfig) -> Result<bool> {
    let r = root(pair, eq)?;
    is_zero(&r.z, cfg)
}

/// Enumerate candidate shifts ordered by total displacement.
fn shift_candidates(allow: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a in -allow..=allow {
        for b in -allow..=allow {
            out.push((a, b));
        }
    }
    out.sort_by_key(|&(a, b)| (a.abs() + b.abs(), a, b));
    out
}

/// Estimate the constant `c` with `a ≈ c·b` by sampling; the caller must
/// confirm symbolically. `None` when no informative sample point is found.
fn sampled_ratio(a: &Expr, b: &Expr, cfg: &ZeroTestConfig) -> Result<Option<BigRational>> {
    let mut syms = a.symbols();
    syms.extend(b.symbols());
    let mut vars = a.lattice_vars();
    vars.extend(b.lattice_vars());
    let mut sampler = PointSampler::new(cfg);
    let max_den = BigInt::from(1_000_000i64);
    for _ in 0..cfg.max_resamples {
        let pt = sampler.draw(&syms, &vars);
        let (va, vb) = match (evaluate(a, &pt), evaluate(b, &pt)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(Error::Domain { .. }), _) | (_, Err(Error::Domain { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        match (va, vb) {
            (Value::Exact(x), Value::Exact(y)) => {
                if y.is_zero() {
                    continue;
                }
                return Ok(Some(x / y));
            }
            (x, y) => {
                let xf = match x {
                    Value::Exact(q) => Fx::from_rational(&q, pt.prec),
                    Value::Approx(f) => f,
                };
                let yf = match y {
                    Value::Exact(q) => Fx::from_rational(&q, pt.prec),
                    Value::Approx(f) => f,
                };
                if yf.is_zero() {
                    continue;
                }
                let ratio = match xf.div(&yf) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
                if let Some(q) = rational_reconstruct(&ratio, &max_den) {
                    return Ok(Some(q));
                }
            }
        }
    }
    Ok(None)
}

/// Decide whether two roots describe equivalent conservation laws:
/// equality up to a nonzero constant factor and a lattice translation with
/// displacement at most `allow_shifts` in each direction. The returned
/// factor and shift are confirmed symbolically before being reported.
pub fn equivalent_roots(
    a: &Expr,
    b: &Expr,
    allow_shifts: i64,
    cfg: &ZeroTestConfig,
) -> Result<Equivalence> {
    let a_triv = is_zero(a, cfg)?;
    let b_triv = is_zero(b, cfg)?;
    if a_triv && b_triv {
        return Ok(Equivalence::Equivalent { factor: BigRational::from(BigInt::from(1)), shift: (0, 0) });
    }
    if a_triv != b_triv {
        return Ok(Equivalence::Distinct);
    }
    for (dm, dn) in shift_candidates(allow_shifts) {
        let shifted = shift(b, dm, dn);
        if let Some(c) = sampled_ratio(a, &shifted, cfg)? {
            if c.is_zero() {
                continue;
            }
            let resid = a.clone() - Expr::num(c.clone()) * shifted;
            if is_zero(&resid, cfg)? {
                return Ok(Equivalence::Equivalent { factor: c, shift: (dm, dn) });
            }
        }
    }
    Ok(Equivalence::Distinct)
}

/// [`equivalent_roots`] applied to the z-forms of two computed roots.
pub fn equivalent(
    a: &Root,
    b: &Root,
    allow_shifts: i64,
    cfg: &ZeroTestConfig,
) -> Result<Equivalence> {
    equivalent_roots(&a.z, &b.z, allow_shifts, cfg)
}

/// Recovers a characteristic from a conservation law by the linear
/// homotopy: expand the divergence off solutions as `C(z, [Δ])`, apply the
/// variational derivative with respect to Δ, scale every Δ-placeholder by λ
/// and integrate λ over [0,1]. The result `Q` satisfies
/// `E(Q·Δ_expr) ≡ 0`, where `E` is the Euler operator ([`characteristic_check`]).
pub fn characteristic_from_claw(
    pair: &DensityPair,
    eq: &Equation,
    cfg: &ZeroTestConfig,
) -> Result<Expr> {
    let mut d = pair.divergence();
    if matches!(eq, Equation::Kovalevskaya(_)) {
        d = lift_to_rows(&d);
    }
    let data = eq.default_data();
    let c = pullback_with_delta(&d, eq, &data)?;
    let ed = euler_delta(&c);
    let lambda = Expr::sym(Symbol::Lambda);
    let scaled = substitute_where(&ed, Family::Delta, &|_, _| true, &|a, b| {
        lambda.clone() * Expr::delta(a, b)
    });
    integrate_lambda_01(&scaled, cfg)
}

/// Substitutes each Δ-placeholder `D[a,b]` in `q` by the correspondingly
/// shifted defining expression of the equation.
pub fn substitute_delta(q: &Expr, eq: &Equation) -> Expr {
    let delta = eq.delta();
    substitute_where(q, Family::Delta, &|_, _| true, &|a, b| shift(&delta, a, b))
}

/// Checks that `Q` is a characteristic for the equation: `Q·Δ_expr` must be
/// annihilated by the Euler operator as an identity in the free lattice
/// variables (no pullback to initial data is involved). `Q` may mention the
/// defining expression through Δ-placeholders.
pub fn characteristic_check(q: &Expr, eq: &Equation, cfg: &ZeroTestConfig) -> Result<bool> {
    let delta = eq.delta();
    let p = substitute_delta(q, eq) * delta;
    is_zero(&euler(&p), cfg)
}

/// Represents `p` as a divergence `(S_m−I)F + (S_n−I)G`. Every additive term
/// is telescoped to its anchor (minimal m- and n-offsets moved to zero);
/// the construction succeeds when the anchored remainder cancels, or is a
/// bare constant (absorbed as `c·m`).
pub fn divergence_representation(p: &Expr, cfg: &ZeroTestConfig) -> Result<DensityPair> {
    use crate::equations::transform::geometric;
    let mut f = Expr::zero();
    let mut g = Expr::zero();
    let mut residual = Expr::zero();
    for t in expand(p).terms() {
        let vars = t.lattice_vars();
        let a = vars.iter().map(|v| v.dm).min().unwrap_or(0);
        let b = vars.iter().map(|v| v.dn).min().unwrap_or(0);
        let anchor = shift(&t, -a, -b);
        // t = S_m^a S_n^b anchor; S^aT^b − I = (S^a−I)T^b + (T^b−I).
        f = f + geometric(&shift(&anchor, 0, b), a, true);
        g = g + geometric(&anchor, b, false);
        residual = residual + anchor;
    }
    if !is_zero(&residual, cfg)? {
        // A residue free of lattice variables and genuinely constant in both
        // labels (shift-invariant) can be absorbed as (S_m−I)(m·residual).
        let m_const = is_zero(&(shift(&residual, 1, 0) - residual.clone()), cfg)?;
        let n_const = is_zero(&(shift(&residual, 0, 1) - residual.clone()), cfg)?;
        if residual.lattice_vars().is_empty() && m_const && n_const {
            f = f + Expr::m() * residual;
        } else {
            return Err(Error::NotVariational {
                message: "expression is not a recognizable divergence".into(),
            });
        }
    }
    Ok(DensityPair::new(f, g))
}

/// Tests the variational-symmetry condition for a symmetry characteristic
/// `Q` of the Euler–Lagrange equation of `L`: the Euler operator must
/// annihilate `Q·E(L)` identically.
pub fn is_variational_symmetry(q: &Expr, lagrangian: &Expr, cfg: &ZeroTestConfig) -> Result<bool> {
    let el = euler(lagrangian);
    is_zero(&euler(&(q.clone() * el)), cfg)
}

/// Noether's construction: for a variational symmetry characteristic `Q` of
/// the Euler–Lagrange equation of `L`, the product `Q·E(L)` is an exact
/// divergence; the returned densities satisfy `Div(F,G) = Q·E(L)`
/// identically, hence form a conservation law of the Euler–Lagrange
/// equation with characteristic `Q`.
pub fn noether_claw(q: &Expr, lagrangian: &Expr, cfg: &ZeroTestConfig) -> Result<DensityPair> {
    if !is_variational_symmetry(q, lagrangian, cfg)? {
        return Err(Error::NotVariational {
            message: "the Euler operator does not annihilate Q·E(L)".into(),
        });
    }
    let p = q.clone() * euler(lagrangian);
    divergence_representation(&p, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(src: &str) -> Expr {
        parse(src).unwrap()
    }

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    /// The potential KdV quad-graph equation used across the test corpus.
    fn lpkdv() -> Equation {
        let mut corners = alloc::collections::BTreeMap::new();
        corners.insert((1, 1), e("u[0,0] + (beta - alpha)/(u[1,0] - u[0,1])"));
        corners.insert((0, 0), e("u[1,1] + (beta - alpha)/(u[0,1] - u[1,0])"));
        corners.insert((1, 0), e("u[0,1] + (beta - alpha)/(u[1,1] - u[0,0])"));
        corners.insert((0, 1), e("u[1,0] - (beta - alpha)/(u[1,1] - u[0,0])"));
        Equation::Quad(
            crate::equations::QuadGraphPde::new(
                corners,
                alloc::vec![Symbol::Alpha, Symbol::Beta],
                &cfg(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn second_kind_trivial_pair_has_zero_root() {
        // F = (S_n−I)H, G = −(S_m−I)H is identically conserved.
        let h = e("u[0,0]^2*u[1,0] + alpha*u[0,1]");
        let f = shift(&h, 0, 1) - h.clone();
        let g = h.clone() - shift(&h, 1, 0);
        let pair = DensityPair::new(f, g);
        let eq = lpkdv();
        assert!(verify_claw(&pair, &eq, &cfg()).unwrap());
        assert!(is_trivial(&pair, &eq, &cfg()).unwrap());
    }

    #[test]
    fn first_kind_trivial_pair_has_zero_root() {
        // Densities proportional to the defining expression vanish on
        // solutions; the conservation law is trivial.
        let eq = lpkdv();
        let delta = eq.delta();
        let f = delta.clone() * e("u[0,0]");
        let g = delta * e("alpha - u[1,0]");
        let pair = DensityPair::new(f, g);
        assert!(verify_claw(&pair, &eq, &cfg()).unwrap());
        assert!(is_trivial(&pair, &eq, &cfg()).unwrap());
    }

    #[test]
    fn equivalence_detects_scaled_shifts() {
        let a = e("parity(1,0,0)*(u[1,1]-u[1,0])");
        let b = shift(&a, 1, 1) * Expr::rat(-3, 2);
        match equivalent_roots(&a, &b, 2, &cfg()).unwrap() {
            Equivalence::Equivalent { factor, shift } => {
                // a = factor · S^{(dm,dn)} b; undoing the construction:
                // S^{(-1,-1)} b = -3/2 a, so factor = -2/3 at shift (-1,-1).
                assert_eq!(shift, (-1, -1));
                assert_eq!(factor, BigRational::new(BigInt::from(-2), BigInt::from(3)));
            }
            other => panic!("expected equivalence, got {other:?}"),
        }
    }

    #[test]
    fn equivalence_rejects_unrelated_roots() {
        let a = e("u[1,1]-u[1,0]");
        let b = e("u[1,1]*u[1,0] + alpha");
        assert_eq!(equivalent_roots(&a, &b, 2, &cfg()).unwrap(), Equivalence::Distinct);
    }

    #[test]
    fn divergence_representation_round_trips() {
        let f = e("u[0,0]*u[1,1] + m*alpha");
        let g = e("u[0,-1] - u[2,0]^2");
        let p = divergence(&f, &g);
        let pair = divergence_representation(&p, &cfg()).unwrap();
        let resid = pair.divergence() - p;
        assert!(is_zero(&resid, &cfg()).unwrap());
    }

    #[test]
    fn translation_is_variational_for_discrete_dirichlet_lagrangian() {
        let l = e("(u[1,0]-u[0,0])*(u[0,1]-u[0,0])");
        assert!(is_variational_symmetry(&Expr::one(), &l, &cfg()).unwrap());
        let pair = noether_claw(&Expr::one(), &l, &cfg()).unwrap();
        let resid = pair.divergence() - Expr::one() * euler(&l);
        assert!(is_zero(&resid, &cfg()).unwrap());
    }

    #[test]
    fn cubic_lagrangian_translation_is_obstructed() {
        // E(u00·u10·u01) = u10u01 + u_{-1,0}u_{-1,1} + u_{0,-1}u_{1,-1};
        // translation fails the variational-symmetry condition.
        let l = e("u[0,0]*u[1,0]*u[0,1]");
        assert!(!is_variational_symmetry(&Expr::one(), &l, &cfg()).unwrap());
        assert!(matches!(
            noether_claw(&Expr::one(), &l, &cfg()),
            Err(Error::NotVariational { .. })
        ));
    }
}
