//! Density reconstruction for partial difference equations in Kovalevskaya
//! form.
//!
//! The root of a conservation law, written in the solved-point slots
//! `D[0,j] = S_n^j ω`, determines the part of the density that rides on the
//! equation. A one-parameter homotopy integral recovers that part
//! (`reconstruct_f_dependence`); negative slot shifts are traded away by
//! adding divergence terms, mirroring the fact that conservation laws are
//! only defined up to trivial ones. The remaining, equation-free part of the
//! pair is fixed by a differential-elimination cascade over a user-supplied
//! ansatz (`complete_densities`). A characteristic with the given root can
//! also be read off from the recovered part (`characteristic_from_partial`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::claw::{root as claw_root, verify_claw, DensityPair, Root};
use crate::equations::{pullback, Equation, KovalevskayaPde};
use crate::error::{Error, Result};
use crate::expr::{
    depends_on, differentiate, expand, exprs_equal, is_zero, shift, substitute_where, Expr,
    Family, LatticeVar, Symbol, ZeroTestConfig,
};
use crate::integrate::{integrate_in_var, integrate_lambda_01};
use crate::linalg::solve_rational;
use crate::ops::{divergence, euler_delta, euler_omega};

/// Argument lists for the undetermined functions of a density completion:
/// one unknown inside `F` and one inside `G`, each depending on `m`, `n`,
/// and the listed initial-data points.
#[derive(Debug, Clone)]
pub struct AnsatzSpec {
    pub f_args: Vec<LatticeVar>,
    pub g_args: Vec<LatticeVar>,
}

impl AnsatzSpec {
    /// Validates the argument lists against the equation's data strip: the
    /// `F`-unknown reappears shifted by `S_m`, so its arguments must stay
    /// strictly below the solved row even after that shift; the `G`-unknown
    /// is only ever shifted by `S_n`, which preserves rows.
    pub fn new(
        eq: &KovalevskayaPde,
        f_args: Vec<LatticeVar>,
        g_args: Vec<LatticeVar>,
    ) -> Result<AnsatzSpec> {
        for v in &f_args {
            if v.family != Family::U || v.dm < 0 || v.dm > eq.k - 2 {
                return Err(Error::invalid(format!(
                    "F-unknown argument {v:?} must be a data point in rows 0..{}",
                    eq.k - 1
                )));
            }
        }
        for v in &g_args {
            if v.family != Family::U || v.dm < 0 || v.dm > eq.k - 1 {
                return Err(Error::invalid(format!(
                    "G-unknown argument {v:?} must be a data point in rows 0..{}",
                    eq.k
                )));
            }
        }
        Ok(AnsatzSpec { f_args, g_args })
    }

    /// An ansatz with no undetermined lattice dependence at all (both
    /// unknowns reduce to functions of `m`, `n` alone).
    pub fn labels_only() -> AnsatzSpec {
        AnsatzSpec { f_args: Vec::new(), g_args: Vec::new() }
    }
}

fn slot_vars(e: &Expr) -> BTreeSet<LatticeVar> {
    e.lattice_vars().into_iter().filter(|v| v.family == Family::Delta).collect()
}

fn has_negative_slot(e: &Expr) -> bool {
    slot_vars(e).iter().any(|v| v.dn < 0)
}

/// Recovers the equation-dependent part of `S_m F` from a root.
///
/// With slots scaled along the homotopy `ω_λ = λ·ω + (1−λ)·g`, the recovered
/// part is `(ω_{00} − g) ∫_0^1 q̄[ω_λ] dλ` up to divergence terms and an
/// ω-free remainder. Terms carrying negative slot shifts are moved up by
/// adding `(S_n − I)`-images of themselves — each pass is the addition of a
/// trivial conservation law — until only slots `D[0,j]` with `j ≥ 0` remain;
/// the λ-integral is evaluated last.
///
/// The base point `g` must be chosen so that the integrand is nonsingular on
/// `λ ∈ [0,1]`; `0` is the usual choice, and a singular integral reports
/// `SingularIntegrand` so that callers can retry with another base point.
pub fn reconstruct_f_dependence(
    eq: &KovalevskayaPde,
    qbar: &Root,
    g: &Expr,
    cfg: &ZeroTestConfig,
) -> Result<Expr> {
    let _ = eq;
    let lam = Expr::sym(Symbol::Lambda);
    let one_minus = Expr::int(1) - lam.clone();
    let scaled = substitute_where(&qbar.slots, Family::Delta, &|_, _| true, &|a, b| {
        lam.clone() * Expr::delta(a, b) + one_minus.clone() * g.clone()
    });
    let mut integrand = (Expr::delta(0, 0) - g.clone()) * scaled;
    for _ in 0..32 {
        if !has_negative_slot(&integrand) {
            break;
        }
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for t in expand(&integrand).terms() {
            if has_negative_slot(&t) {
                neg.push(t);
            } else {
                rest.push(t);
            }
        }
        let moved = shift(&Expr::add(neg), 0, 1);
        integrand = Expr::add(rest) + moved;
    }
    if has_negative_slot(&integrand) {
        return Err(Error::negative_shift_irremovable(
            "negative slot shifts persist after the bounded removal procedure",
        ));
    }
    integrate_lambda_01(&integrand, cfg)
}

/// Builds a characteristic with the root that produced `partial`.
///
/// `partial` is the recovered `S_m F` in slots. Replacing each slot
/// `D[0,j]` by `D[0,j] + S_n^j ω(z)` — so that the slot variables now stand
/// for shifts of the defining residual `Δ` — and applying the variational
/// derivative in `Δ` followed by the scaling homotopy `Δ ↦ λΔ` yields
/// `Q(z,[Δ])` with `Q·Δ` a conservation law equivalent to the original.
pub fn characteristic_from_partial(
    eq: &KovalevskayaPde,
    partial: &Expr,
    cfg: &ZeroTestConfig,
) -> Result<Expr> {
    let lifted = substitute_where(partial, Family::Delta, &|_, _| true, &|a, b| {
        Expr::delta(a, b) + shift(&eq.omega, a, b)
    });
    let ed = euler_delta(&lifted);
    let lam = Expr::sym(Symbol::Lambda);
    let scaled = substitute_where(&ed, Family::Delta, &|_, _| true, &|a, b| {
        lam.clone() * Expr::delta(a, b)
    });
    integrate_lambda_01(&scaled, cfg)
}

struct Unknown {
    m_side: bool,
    args: Vec<LatticeVar>,
}

/// Completes a density pair from the recovered equation-dependent part.
///
/// The known part of `F` is obtained by realizing the slots of `partial` as
/// the solved points `u[K, σ+j]` and shifting down by `S_m^{-1}`. The
/// unknowns of the ansatz are then determined by differential elimination on
/// the on-solutions residual: at each step, a data point contained in
/// exactly one shifted unknown occurrence isolates that occurrence's
/// derivative, which is integrated and substituted back. The terminal
/// residual, a function of `m`, `n` alone, is absorbed by a two-function
/// difference equation solved over a polynomial-and-parity span. The
/// completed pair is verified to be a conservation law whose root matches
/// the input.
pub fn complete_densities(
    eq: &Equation,
    partial: &Expr,
    ansatz: &AnsatzSpec,
    cfg: &ZeroTestConfig,
) -> Result<DensityPair> {
    let Equation::Kovalevskaya(kov) = eq else {
        return Err(Error::unsupported_equation(
            "density completion works on Kovalevskaya form; transform the equation first",
        ));
    };
    let realized = substitute_where(partial, Family::Delta, &|_, _| true, &|_a, b| {
        Expr::u(kov.k, kov.sigma + b)
    });
    let mut f_acc = shift(&realized, -1, 0);
    let mut g_acc = Expr::int(0);
    if f_acc.lattice_vars().iter().any(|v| v.dm < 0) {
        return Err(Error::ansatz_insufficient(
            "the recovered density part reaches below the data strip",
        ));
    }

    let mut unknowns = vec![
        Unknown { m_side: true, args: ansatz.f_args.clone() },
        Unknown { m_side: false, args: ansatz.g_args.clone() },
    ];

    while unknowns.iter().any(|u| !u.args.is_empty()) {
        let resid = on_residual(eq, &f_acc, &g_acc)?;
        // Shifted occurrences of the unknowns inside the divergence:
        // +S_m f − f for the F-side, +S_n G − G for the G-side.
        let mut occs: Vec<(usize, i64, (i64, i64))> = Vec::new();
        for (i, u) in unknowns.iter().enumerate() {
            if u.args.is_empty() {
                continue;
            }
            let s = if u.m_side { (1, 0) } else { (0, 1) };
            occs.push((i, 1, s));
            occs.push((i, -1, (0, 0)));
        }
        let mut membership: BTreeMap<LatticeVar, Vec<usize>> = BTreeMap::new();
        for (oi, (uidx, _, s)) in occs.iter().enumerate() {
            for a in &unknowns[*uidx].args {
                let v = LatticeVar::u(a.dm + s.0, a.dn + s.1);
                membership.entry(v).or_default().push(oi);
            }
        }
        let picked = membership.iter().find(|(_, os)| os.len() == 1).map(|(v, os)| (*v, os[0]));
        let Some((v, oi)) = picked else {
            return Err(Error::ansatz_insufficient(
                "no data point isolates a single unknown occurrence; refine the ansatz",
            ));
        };
        let (uidx, sign, s) = occs[oi];
        // 0 = ∂resid/∂v + sign · ∂(unknown occurrence)/∂v.
        let dv = differentiate(&resid, v);
        if is_zero(&dv, cfg)? {
            // Nothing to determine at this point; the dependence is absent.
            let home = LatticeVar::u(v.dm - s.0, v.dn - s.1);
            unknowns[uidx].args.retain(|a| *a != home);
            continue;
        }
        let mut det_shifted = integrate_with_cleanup(&(Expr::int(-sign) * dv), v, cfg)?;
        let occ_args: BTreeSet<LatticeVar> = unknowns[uidx]
            .args
            .iter()
            .map(|a| LatticeVar::u(a.dm + s.0, a.dn + s.1))
            .collect();
        if !depends_within(&det_shifted, &occ_args, cfg)? {
            // The antiderivative is only fixed up to a part free of the
            // integration point; re-anchor it there before giving up.
            let anchored =
                det_shifted.clone() - crate::expr::substitute(&det_shifted, v, &Expr::int(8191));
            if !depends_within(&anchored, &occ_args, cfg)? {
                return Err(Error::ansatz_insufficient(
                    "a determined part depends on points outside the unknown's arguments",
                ));
            }
            det_shifted = anchored;
        }
        let det_shifted = strip_outside(&det_shifted, &occ_args, cfg)?;
        let det = shift(&det_shifted, -s.0, -s.1);
        if unknowns[uidx].m_side {
            f_acc = f_acc + det;
        } else {
            g_acc = g_acc + det;
        }
        let home = LatticeVar::u(v.dm - s.0, v.dn - s.1);
        unknowns[uidx].args.retain(|a| *a != home);
    }

    let resid = on_residual(eq, &f_acc, &g_acc)?;
    for v in resid.lattice_vars() {
        if depends_on(&resid, v, cfg)? {
            return Err(Error::ansatz_insufficient(
                "the residual still involves data points after eliminating every unknown argument",
            ));
        }
    }
    let resid = strip_inert_vars(&resid, cfg)?;
    if !is_zero(&resid, cfg)? {
        let (fm, gm) = solve_label_pair(&resid, cfg)?;
        f_acc = f_acc + fm;
        g_acc = g_acc + gm;
    }

    let f_acc = strip_inert_vars(&f_acc, cfg)?;
    let g_acc = strip_inert_vars(&g_acc, cfg)?;
    let pair = DensityPair::new(f_acc, g_acc);
    if !verify_claw(&pair, eq, cfg)? {
        return Err(Error::inconsistent_root(
            "completed densities do not close to a conservation law",
        ));
    }
    let jmax = slot_vars(partial).iter().map(|v| v.dn).max().unwrap_or(0);
    let want = euler_omega(partial, jmax.max(0));
    let got = claw_root(&pair, eq)?;
    if !is_zero(&(got.slots - want), cfg)? {
        return Err(Error::inconsistent_root(
            "completed densities have a root different from the input",
        ));
    }
    Ok(pair)
}

fn on_residual(eq: &Equation, f: &Expr, g: &Expr) -> Result<Expr> {
    let d = divergence(f, g);
    pullback(&d, eq, &eq.default_data())
}

/// Solves `(S_m−I)f(m,n) + (S_n−I)g(m,n) = −resid` for label-only functions
/// over the span `{m^p n^q : p+q ≤ 2}` times `{1, (−1)^m, (−1)^n, (−1)^{m+n}}`,
/// with free coefficients set to zero.
fn solve_label_pair(resid: &Expr, cfg: &ZeroTestConfig) -> Result<(Expr, Expr)> {
    // (p, q, parity kind): kind 0 plain, 1 = (−1)^m, 2 = (−1)^n, 3 = (−1)^{m+n}.
    let mut shapes: Vec<(u32, u32, u8)> = Vec::new();
    for kind in 0..4u8 {
        for (p, q) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
            shapes.push((p, q, kind));
        }
    }
    let symbolic = |&(p, q, kind): &(u32, u32, u8)| -> Expr {
        let mut e = Expr::pow(Expr::m(), i64::from(p)) * Expr::pow(Expr::n(), i64::from(q));
        e = match kind {
            1 => e * Expr::parity(1, 0, 0),
            2 => e * Expr::parity(0, 1, 0),
            3 => e * Expr::parity(1, 1, 0),
            _ => e,
        };
        e
    };
    let value = |&(p, q, kind): &(u32, u32, u8), m: i64, n: i64| -> BigRational {
        let mut x = 1i64;
        for _ in 0..p {
            x *= m;
        }
        for _ in 0..q {
            x *= n;
        }
        let sgn = match kind {
            1 => m,
            2 => n,
            3 => m + n,
            _ => 0,
        };
        if sgn.rem_euclid(2) == 1 {
            x = -x;
        }
        BigRational::from(BigInt::from(x))
    };
    // The residual may be structurally huge (unsimplified parameter algebra
    // left over from pulling back through the equation), so solving with it
    // as a symbolic right-hand side is hopeless. Instead: its value is a
    // polynomial of low degree in the parameters with label-dependent
    // coefficients, so sample the parameters at a few rational points,
    // collapse the residual to a small label-only expression per sample,
    // read off the per-monomial coefficients pointwise, solve each monomial's
    // label system exactly, and verify the assembled pair once at the end.
    let params: Vec<Symbol> = resid
        .symbols()
        .into_iter()
        .filter(|s| !matches!(s, Symbol::M | Symbol::N))
        .collect();
    if params.len() > 3 {
        return Err(Error::ansatz_insufficient(
            "terminal label residual involves more than three parameters",
        ));
    }
    // Parameter monomials of total degree ≤ 2, as exponent tuples.
    let mut monos: Vec<Vec<u32>> = Vec::new();
    let mut stack = vec![(vec![], 0u32)];
    while let Some((exps, used)) = stack.pop() {
        if exps.len() == params.len() {
            monos.push(exps);
            continue;
        }
        for e in 0..=(2 - used) {
            let mut next = exps.clone();
            next.push(e);
            stack.push((next, used + e));
        }
    }
    monos.sort();

    const PRIMES: [i64; 18] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];
    let vars: Vec<LatticeVar> = resid.lattice_vars().into_iter().collect();
    let nvec = monos.len() + 2;
    let mut collapsed: Vec<Expr> = Vec::with_capacity(nvec);
    let mut vmat: Vec<Vec<BigRational>> = Vec::with_capacity(nvec);
    for s in 0..nvec {
        let mut done = false;
        for trial in 0..40i64 {
            let pvals: Vec<BigRational> = (0..params.len())
                .map(|i| {
                    BigRational::from(BigInt::from(
                        PRIMES[(s * params.len() + i) % PRIMES.len()] + 9973 * trial,
                    ))
                })
                .collect();
            let mut pt = crate::expr::EvalPoint::new(cfg.precision);
            pt.m = 1;
            pt.n = 1;
            for (i, p) in params.iter().enumerate() {
                pt.syms.insert(p.clone(), pvals[i].clone());
            }
            for (j, v) in vars.iter().enumerate() {
                let x = 23 + 101 * j as i64 + 17 * s as i64 + 13 * trial;
                pt.vars.insert(*v, BigRational::from(BigInt::from(x)));
            }
            // Probing the full assignment first rules out values that sit on
            // a pole, which also protects the constant folding below.
            match crate::expr::evaluate(resid, &pt) {
                Ok(crate::expr::Value::Exact(_)) => {}
                Ok(crate::expr::Value::Approx(_)) => {
                    return Err(Error::ansatz_insufficient(
                        "terminal label residual is not rational in the parameters",
                    ));
                }
                Err(Error::Domain { .. }) => continue,
                Err(err) => return Err(err),
            }
            let mut small = crate::expr::substitute_map(
                resid,
                &pt.vars
                    .iter()
                    .map(|(v, r)| (*v, Expr::num(r.clone())))
                    .collect(),
            );
            for (i, p) in params.iter().enumerate() {
                small = crate::expr::substitute_sym(&small, p, &Expr::num(pvals[i].clone()));
            }
            collapsed.push(small);
            vmat.push(
                monos
                    .iter()
                    .map(|exps| {
                        let mut x = BigRational::from(BigInt::from(1));
                        for (i, &e) in exps.iter().enumerate() {
                            for _ in 0..e {
                                x *= &pvals[i];
                            }
                        }
                        x
                    })
                    .collect(),
            );
            done = true;
            break;
        }
        if !done {
            return Err(Error::SamplingExhausted { attempts: 40 });
        }
    }

    let mut a = Vec::new();
    let mut rho: Vec<Vec<BigRational>> = Vec::new(); // per point, per monomial
    for m in -4..=5 {
        for n in -4..=5 {
            let mut row = Vec::with_capacity(2 * shapes.len());
            for sh in &shapes {
                row.push(value(sh, m + 1, n) - value(sh, m, n));
            }
            for sh in &shapes {
                row.push(value(sh, m, n + 1) - value(sh, m, n));
            }
            a.push(row);
            let mut vals = Vec::with_capacity(nvec);
            for small in &collapsed {
                let mut pt = crate::expr::EvalPoint::new(cfg.precision);
                pt.m = m;
                pt.n = n;
                match crate::expr::evaluate(small, &pt)? {
                    crate::expr::Value::Exact(r) => vals.push(r),
                    crate::expr::Value::Approx(_) => {
                        return Err(Error::ansatz_insufficient(
                            "terminal label residual is not rational in the parameters",
                        ));
                    }
                }
            }
            let fit = solve_rational(&vmat, &vals).ok_or_else(|| {
                Error::ansatz_insufficient(
                    "terminal label residual is not polynomial of low degree in the parameters",
                )
            })?;
            rho.push(fit);
        }
    }

    let mut f = Expr::int(0);
    let mut g = Expr::int(0);
    for (k, exps) in monos.iter().enumerate() {
        let rhs: Vec<BigRational> = rho.iter().map(|r| -r[k].clone()).collect();
        let coeffs = solve_rational(&a, &rhs).ok_or_else(|| {
            Error::ansatz_insufficient(
                "terminal label residual lies outside the polynomial-and-parity span",
            )
        })?;
        let mut mono = Expr::int(1);
        for (i, &e) in exps.iter().enumerate() {
            mono = mono * Expr::pow(Expr::sym(params[i].clone()), i64::from(e));
        }
        for (j, sh) in shapes.iter().enumerate() {
            if !coeffs[j].is_zero() {
                f = f + Expr::num(coeffs[j].clone()) * symbolic(sh) * mono.clone();
            }
            if !coeffs[shapes.len() + j].is_zero() {
                g = g + Expr::num(coeffs[shapes.len() + j].clone()) * symbolic(sh) * mono.clone();
            }
        }
    }
    // The sampled fit could in principle miss structure the samples cannot
    // see; one semantic check of the assembled pair settles it decisively.
    let check = resid.clone() + (shift(&f, 1, 0) - f.clone()) + (shift(&g, 0, 1) - g.clone());
    if !is_zero(&check, cfg)? {
        return Err(Error::ansatz_insufficient(
            "terminal label residual lies outside the polynomial-and-parity span",
        ));
    }
    Ok((f, g))
}

/// True when every lattice point the expression semantically depends on is a
/// continuous variable from `allowed`.
pub(super) fn depends_within(
    e: &Expr,
    allowed: &BTreeSet<LatticeVar>,
    cfg: &ZeroTestConfig,
) -> Result<bool> {
    for x in e.lattice_vars() {
        if (x.family != Family::U || !allowed.contains(&x)) && depends_on(e, x, cfg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replaces lattice variables the expression does not semantically depend on
/// by large fixed constants, verifying that the value is unchanged; keeps the
/// original expression when verification fails. Clears structural clutter
/// left behind by cancellations that never happen node-by-node.
pub(super) fn strip_inert_vars(e: &Expr, cfg: &ZeroTestConfig) -> Result<Expr> {
    strip_outside(e, &BTreeSet::new(), cfg)
}

/// As [`strip_inert_vars`], but variables listed in `keep` are left alone
/// even when the expression is independent of them.
pub(super) fn strip_outside(
    e: &Expr,
    keep: &BTreeSet<LatticeVar>,
    cfg: &ZeroTestConfig,
) -> Result<Expr> {
    let mut inert: Vec<LatticeVar> = Vec::new();
    for v in e.lattice_vars() {
        if !keep.contains(&v) && !depends_on(e, v, cfg)? {
            inert.push(v);
        }
    }
    if inert.is_empty() {
        return Ok(e.clone());
    }
    for trial in 0..4i64 {
        // Large odd values keep the small-coefficient linear forms that occur
        // in denominators away from zero; the equality check below still
        // guards against an unlucky collapse.
        let mut map = BTreeMap::new();
        for (i, v) in inert.iter().enumerate() {
            map.insert(*v, Expr::int(8191 + 97 * i as i64 + 13 * trial));
        }
        let s = crate::expr::substitute_map(e, &map);
        if let Ok(true) = exprs_equal(&s, e, cfg) {
            return Ok(s);
        }
    }
    Ok(e.clone())
}

/// Integrate, retrying without pairwise-cancelling additive terms when the
/// first attempt finds no verified antiderivative. Differentiating a
/// pulled-back residual routinely leaves such pairs behind.
pub(super) fn integrate_with_cleanup(
    e: &Expr,
    v: LatticeVar,
    cfg: &ZeroTestConfig,
) -> Result<Expr> {
    match integrate_in_var(e, v, cfg) {
        Ok(a) => Ok(a),
        Err(Error::IntegrationUnsupported { .. }) => {
            let cleaned = drop_cancelling_terms(e, cfg)?;
            integrate_in_var(&cleaned, v, cfg)
        }
        Err(err) => Err(err),
    }
}

/// Removes additive terms that vanish on their own and pairs of terms whose
/// sum vanishes.
fn drop_cancelling_terms(e: &Expr, cfg: &ZeroTestConfig) -> Result<Expr> {
    let terms = expand(e).terms();
    let mut kept: Vec<Option<Expr>> = terms.into_iter().map(Some).collect();
    for i in 0..kept.len() {
        let Some(ti) = kept[i].clone() else { continue };
        if is_zero(&ti, cfg)? {
            kept[i] = None;
            continue;
        }
        for j in (i + 1)..kept.len() {
            let Some(tj) = kept[j].clone() else { continue };
            if is_zero(&(ti.clone() + tj), cfg)? {
                kept[i] = None;
                kept[j] = None;
                break;
            }
        }
    }
    Ok(Expr::add(kept.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claw::root;
    use crate::expr::parse;

    fn e(src: &str) -> Expr {
        parse(src).expect("parse")
    }

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    /// The shift equation u[1,0] = u[0,0] as a first-order Kovalevskaya form.
    fn shift_eq() -> Equation {
        Equation::Kovalevskaya(
            KovalevskayaPde::new(1, 0, e("u[0,0]"), Some(e("w")), vec![], &cfg()).unwrap(),
        )
    }

    #[test]
    fn quadratic_density_round_trip() {
        let eq = shift_eq();
        let pair = DensityPair::new(e("u[0,0]^2"), Expr::int(0));
        let q = root(&pair, &eq).unwrap();
        assert!(is_zero(&(q.slots.clone() - e("2*D[0,0]")), &cfg()).unwrap());
        let Equation::Kovalevskaya(kov) = &eq else { unreachable!() };
        let partial = reconstruct_f_dependence(kov, &q, &Expr::int(0), &cfg()).unwrap();
        assert!(is_zero(&(partial.clone() - e("D[0,0]^2")), &cfg()).unwrap());
        let done = complete_densities(&eq, &partial, &AnsatzSpec::labels_only(), &cfg()).unwrap();
        let q2 = root(&done, &eq).unwrap();
        assert!(is_zero(&(q2.slots - q.slots), &cfg()).unwrap());
    }

    #[test]
    fn negative_slots_are_traded_for_divergence_terms() {
        let eq = shift_eq();
        let Equation::Kovalevskaya(kov) = &eq else { unreachable!() };
        // A slot product with one index below zero: the removal pass shifts
        // it up, so the homotopy integral is over D[0,0]·D[0,1].
        let qbar = Root { slots: e("D[0,-1]"), z: e("u[0,-1]") };
        let partial = reconstruct_f_dependence(kov, &qbar, &Expr::int(0), &cfg()).unwrap();
        assert!(
            is_zero(&(partial.clone() - e("1/2*D[0,0]*D[0,1]")), &cfg()).unwrap(),
            "got {partial}"
        );
    }

    #[test]
    fn label_pair_solver_handles_parity_sources() {
        // (S_m−I)f + (S_n−I)g = 2(−1)^m c: solved by g = n·(−1)^m·2c.
        let resid = e("-2*parity(1,0,0)*(alpha^2 - beta^2)");
        let (f, g) = solve_label_pair(&resid, &cfg()).unwrap();
        let d = shift(&f, 1, 0) - f.clone() + shift(&g, 0, 1) - g.clone();
        let back = d + resid;
        assert!(is_zero(&back, &cfg()).unwrap(), "difference equation not solved");
    }
}
