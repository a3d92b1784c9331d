//! Antiderivatives with respect to a single lattice variable.
//!
//! Strategy, per additive term: variable-free terms, polynomial terms
//! (Taylor-verified), powers of linear arguments, and candidate-derivative
//! matching (covering `f'/f → ln f` and derivative-of-radical patterns).
//! Terms that no rule resolves are integrated together by a fit-and-verify
//! fallback: ansatz candidates are harvested from the integrand, their
//! coefficients fitted numerically (allowing geometric dependence on the
//! lattice labels), rationally reconstructed, and the result is checked by
//! differentiation. Anything unverified is an error, never a wrong answer.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::fixed::{rational_reconstruct, Fx};
use crate::expr::{
    depends_on, differentiate, evaluate, is_zero, substitute, EvalPoint, Expr, LatticeVar,
    PointSampler, Value, ZeroTestConfig,
};

const MAX_POLY_DEGREE: usize = 8;

/// Antiderivative of `e` in the lattice variable `v`: returns `A` with
/// `∂A/∂v = e`, verified where a fitted ansatz was used. The additive
/// "constant" (anything `v`-free) is always chosen as zero.
pub fn integrate_in_var(e: &Expr, v: LatticeVar, cfg: &ZeroTestConfig) -> Result<Expr> {
    let mut acc = Expr::zero();
    let mut unresolved: Vec<Expr> = Vec::new();
    for term in e.terms() {
        match integrate_term(&term, v, cfg)? {
            Some(a) => acc = acc + a,
            None => unresolved.push(term),
        }
    }
    if !unresolved.is_empty() {
        let rest = Expr::add(unresolved);
        acc = acc + fit_antiderivative(&rest, v, cfg)?;
    }
    Ok(acc)
}

fn integrate_term(term: &Expr, v: LatticeVar, cfg: &ZeroTestConfig) -> Result<Option<Expr>> {
    let x = Expr::var(v);
    // Split off structurally v-free factors.
    let mut coeff: Vec<Expr> = Vec::new();
    let mut core: Vec<Expr> = Vec::new();
    for f in term.factors() {
        if f.lattice_vars().contains(&v) {
            core.push(f);
        } else {
            coeff.push(f);
        }
    }
    if core.is_empty() {
        return Ok(Some(term.clone() * x));
    }
    let coeff = Expr::mul(coeff);
    let core = Expr::mul(core);

    // Polynomial in v (verified by a residual check, so false positives from
    // Taylor expansion of non-polynomial parts are impossible).
    if let Some(coeffs) = poly_in_var(&core, v, cfg)? {
        let mut acc = Expr::zero();
        for (t, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero_expr() {
                acc = acc + c * Expr::rat(1, (t + 1) as i64) * Expr::pow(x.clone(), (t + 1) as i64);
            }
        }
        return Ok(Some(coeff * acc));
    }

    // Negative power of an expression linear in v.
    if let Expr::Pow(base, k) = &core {
        if *k < 0 {
            let a = differentiate(base, v);
            if !is_zero(&a, cfg)? && !depends_on(&a, v, cfg)? {
                let anti = if *k == -1 {
                    Expr::ln((**base).clone()) / a
                } else {
                    Expr::pow((**base).clone(), k + 1) / (Expr::int(k + 1) * a)
                };
                return Ok(Some(coeff * anti));
            }
        }
    }

    // Candidate-derivative matching on the whole term: A with term = c·A',
    // c free of v. Covers f'/f → ln f and radical chains.
    for cand in candidate_antiderivatives(term, v) {
        let da = differentiate(&cand, v);
        if is_zero(&da, cfg)? {
            continue;
        }
        let c = term.clone() / da;
        if !depends_on(&c, v, cfg)? {
            return Ok(Some(c * cand));
        }
    }
    Ok(None)
}

/// Dense coefficients of `e` as a polynomial in `v`, or `None` when `e` is
/// not polynomial (detected by a residual zero-test).
fn poly_in_var(e: &Expr, v: LatticeVar, cfg: &ZeroTestConfig) -> Result<Option<Vec<Expr>>> {
    // Cheap structural bail-out: v under a denominator, radical, or
    // logarithm cannot be polynomial, and substituting v = 0 there could
    // divide by zero.
    let mut bad = false;
    e.visit(&mut |sub| match sub {
        Expr::Pow(base, k) if *k < 0 && base.lattice_vars().contains(&v) => bad = true,
        Expr::Root(base, _) | Expr::Ln(base) if base.lattice_vars().contains(&v) => bad = true,
        _ => {}
    });
    if bad {
        return Ok(None);
    }
    let x = Expr::var(v);
    let mut coeffs = Vec::new();
    let mut deriv = e.clone();
    let mut factorial = BigRational::one();
    for t in 0..=MAX_POLY_DEGREE {
        if t > 0 {
            deriv = differentiate(&deriv, v);
            factorial *= BigRational::from(BigInt::from(t as i64));
        }
        let at0 = substitute(&deriv, v, &Expr::zero());
        coeffs.push(at0 * Expr::num(factorial.recip()));
        if is_zero(&deriv, cfg)? {
            break;
        }
    }
    // Residual check: Σ c_t v^t must reproduce e exactly.
    let mut rebuilt = Expr::zero();
    for (t, c) in coeffs.iter().enumerate() {
        rebuilt = rebuilt + c.clone() * Expr::pow(x.clone(), t as i64);
    }
    if is_zero(&(rebuilt - e.clone()), cfg)? {
        Ok(Some(coeffs))
    } else {
        Ok(None)
    }
}

/// Harvest plausible antiderivative shapes from the structure of a term:
/// logarithms of denominators and radical subterms.
fn candidate_antiderivatives(term: &Expr, v: LatticeVar) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    let mut push = |e: Expr| {
        if !out.iter().any(|x| *x == e) {
            out.push(e);
        }
    };
    term.visit(&mut |sub| match sub {
        Expr::Pow(base, k) if *k < 0 && base.lattice_vars().contains(&v) => {
            push(Expr::ln((**base).clone()));
            push(Expr::pow((**base).clone(), k + 1));
        }
        Expr::Root(base, q) if base.lattice_vars().contains(&v) => {
            push(Expr::Root(base.clone(), q.clone()));
            push(Expr::root_pow((**base).clone(), BigRational::new(BigInt::one(), BigInt::from(2))));
        }
        Expr::Ln(arg) if arg.lattice_vars().contains(&v) => {
            push(Expr::ln((**arg).clone()));
        }
        _ => {}
    });
    out
}

// ---- fit-and-verify fallback ----

/// Candidate basis for the fallback: x, x², radicals found in the integrand,
/// x·radical, logarithms of v-dependent denominators and radicals.
fn fallback_basis(e: &Expr, v: LatticeVar) -> Vec<Expr> {
    let x = Expr::var(v);
    let mut basis = vec![x.clone(), Expr::pow(x.clone(), 2)];
    let push = |b: &mut Vec<Expr>, cand: Expr| {
        if !b.iter().any(|x| *x == cand) {
            b.push(cand);
        }
    };
    let mut radicals: Vec<Expr> = Vec::new();
    let mut denoms: Vec<Expr> = Vec::new();
    e.visit(&mut |sub| match sub {
        Expr::Root(base, _) if base.lattice_vars().contains(&v) => {
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let r = Expr::root_pow((**base).clone(), half);
            if !radicals.iter().any(|x| *x == r) {
                radicals.push(r);
            }
        }
        Expr::Pow(base, k) if *k < 0 && base.lattice_vars().contains(&v) => {
            if !denoms.iter().any(|x| *x == **base) {
                denoms.push((**base).clone());
            }
        }
        _ => {}
    });
    for r in &radicals {
        push(&mut basis, r.clone());
        push(&mut basis, x.clone() * r.clone());
        push(&mut basis, Expr::ln(x.clone() + r.clone()));
    }
    for d in &denoms {
        push(&mut basis, Expr::ln(d.clone()));
    }
    basis
}

/// Evaluate to Fx, treating exact values through the fixed-point lane.
fn eval_fx(e: &Expr, pt: &EvalPoint) -> Result<Fx> {
    Ok(match evaluate(e, pt)? {
        Value::Exact(q) => Fx::from_rational(&q, pt.prec),
        Value::Approx(x) => x,
    })
}

/// A pivot this small (relative to the working precision) is elimination
/// residue from a dependent column, not signal.
fn negligible(x: &Fx) -> bool {
    x.mant.bits() <= (x.prec / 2) as u64
}

/// Solve the square-ish linear system `A c = y` in fixed-point arithmetic by
/// Gaussian elimination with partial pivoting. Numerically dependent columns
/// (candidates whose derivatives coincide up to linear combination) are left
/// free with coefficient zero; the caller verifies the result symbolically.
fn solve_fx(mut a: Vec<Vec<Fx>>, mut y: Vec<Fx>) -> Option<Vec<Fx>> {
    let n = y.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    if cols == 0 || n == 0 {
        return None;
    }
    let mut row = 0usize;
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    for col in 0..cols {
        if row >= n {
            break;
        }
        let mut best = row;
        for r in row..n {
            if a[r][col].cmp_abs(&a[best][col]) == core::cmp::Ordering::Greater {
                best = r;
            }
        }
        if negligible(&a[best][col]) {
            continue;
        }
        a.swap(row, best);
        y.swap(row, best);
        for r in 0..n {
            if r == row {
                continue;
            }
            let factor = a[r][col].div(&a[row][col]).ok()?;
            for c in col..cols {
                let t = factor.mul(&a[row][c]);
                a[r][c] = a[r][c].sub(&t);
            }
            let t = factor.mul(&y[row]);
            y[r] = y[r].sub(&t);
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    let prec = y[0].prec;
    let mut out = Vec::with_capacity(cols);
    for (col, p) in pivot_of_col.iter().enumerate() {
        match p {
            Some(r) => out.push(y[*r].div(&a[*r][col]).ok()?),
            None => out.push(Fx::zero(prec)),
        }
    }
    Some(out)
}

/// Fit coefficients for the candidate basis at fixed lattice labels `(m,n)`,
/// returning one rational per candidate, or `None` if the fit fails.
fn fit_at_labels(
    integrand: &Expr,
    v: LatticeVar,
    basis: &[Expr],
    m: i64,
    n: i64,
    cfg: &ZeroTestConfig,
) -> Result<Option<Vec<BigRational>>> {
    let derivs: Vec<Expr> = basis.iter().map(|b| differentiate(b, v)).collect();
    let syms = integrand.symbols();
    let vars = {
        let mut vs = integrand.lattice_vars();
        vs.insert(v);
        vs
    };
    let mut sampler = PointSampler::new(cfg);
    let rows_needed = basis.len() + 2;
    let mut a: Vec<Vec<Fx>> = Vec::new();
    let mut y: Vec<Fx> = Vec::new();
    let mut attempts = 0;
    while a.len() < rows_needed {
        attempts += 1;
        if attempts > cfg.max_resamples {
            return Ok(None);
        }
        let mut pt = sampler.draw(&syms, &vars);
        pt.m = m;
        pt.n = n;
        let row: Result<Vec<Fx>> = derivs.iter().map(|d| eval_fx(d, &pt)).collect();
        let rhs = eval_fx(integrand, &pt);
        match (row, rhs) {
            (Ok(row), Ok(rhs)) => {
                a.push(row);
                y.push(rhs);
            }
            (Err(Error::Domain { .. }), _) | (_, Err(Error::Domain { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let sol = match solve_fx(a, y) {
        Some(s) => s,
        None => return Ok(None),
    };
    let max_den = BigInt::from(1_000_000i64);
    let mut out = Vec::with_capacity(sol.len());
    for x in &sol {
        match rational_reconstruct(x, &max_den) {
            Some(q) => out.push(q),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn rat_pow(q: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::one();
    let base = if e >= 0 { q.clone() } else { q.recip() };
    for _ in 0..e.unsigned_abs() {
        acc *= base.clone();
    }
    acc
}

/// Model a label-dependent coefficient from values at consecutive labels:
/// geometric in m and n (ratios ±p/q), covering constants, parity factors,
/// and exponential weights.
fn model_coefficient(
    c00: &BigRational,
    c10: &BigRational,
    c01: &BigRational,
    m0: i64,
    n0: i64,
) -> Option<Expr> {
    if c00.is_zero() {
        return if c10.is_zero() && c01.is_zero() { Some(Expr::zero()) } else { None };
    }
    let rho_m = c10 / c00;
    let rho_n = c01 / c00;
    if rho_m.is_zero() || rho_n.is_zero() {
        return None;
    }
    // c(m,n) = c00 · rho_m^(m−m0) · rho_n^(n−n0); decompose signs as parity.
    let (am, sm) = (rho_m.abs(), rho_m.is_negative());
    let (an, sn) = (rho_n.abs(), rho_n.is_negative());
    let mut scale = c00.clone() * rat_pow(&am, -m0) * rat_pow(&an, -n0);
    if sm && m0 % 2 != 0 {
        scale = -scale;
    }
    if sn && n0 % 2 != 0 {
        scale = -scale;
    }
    let mut out = Expr::num(scale);
    if sm || sn {
        out = out * Expr::parity(if sm { 1 } else { 0 }, if sn { 1 } else { 0 }, 0);
    }
    if !am.is_one() {
        out = out * Expr::pow_lin(am, 1, 0, 0);
    }
    if !an.is_one() {
        out = out * Expr::pow_lin(an, 0, 1, 0);
    }
    Some(out)
}

fn fit_antiderivative(e: &Expr, v: LatticeVar, cfg: &ZeroTestConfig) -> Result<Expr> {
    let basis = fallback_basis(e, v);
    let (m0, n0) = (2i64, 3i64);
    let c00 = fit_at_labels(e, v, &basis, m0, n0, cfg)?;
    let c10 = fit_at_labels(e, v, &basis, m0 + 1, n0, cfg)?;
    let c01 = fit_at_labels(e, v, &basis, m0, n0 + 1, cfg)?;
    if let (Some(c00), Some(c10), Some(c01)) = (c00, c10, c01) {
        let mut acc = Expr::zero();
        let mut ok = true;
        for (i, b) in basis.iter().enumerate() {
            match model_coefficient(&c00[i], &c10[i], &c01[i], m0, n0) {
                Some(c) if c.is_zero_expr() => {}
                Some(c) => acc = acc + c * b.clone(),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            // Decisive verification by differentiation.
            let resid = differentiate(&acc, v) - e.clone();
            if is_zero(&resid, cfg)? {
                return Ok(acc);
            }
        }
    }
    Err(Error::integration_unsupported(
        "no verified antiderivative found for the given integrand",
    ))
}
