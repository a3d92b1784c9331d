//! Pullback of expressions onto initial data, with or without tracking the
//! defining residual, plus an independent numeric evolution used to
//! cross-check the symbolic pullback.

use crate::error::{Error, Result};
use crate::expr::{
    evaluate, shift, substitute, EvalPoint, Expr, Family, LatticeVar, Value,
};

use super::{corner_with_delta, Equation, InitialDataSpec, KovalevskayaPde, QuadGraphPde};

/// Hard cap on substitution steps; reaching it indicates a logic error, not a
/// large input.
const MAX_STEPS: usize = 100_000;

/// Rewrites `e` as an expression over the given initial data, using the
/// equation to eliminate every determined point. Off-data points that cannot
/// be reached from the data (negative rows in the Kovalevskaya case) give
/// [`Error::NotReachable`].
pub fn pullback(e: &Expr, eq: &Equation, data: &InitialDataSpec) -> Result<Expr> {
    match (eq, data) {
        (Equation::Kovalevskaya(k), InitialDataSpec::KovalevskayaRows(rows)) => {
            check_rows(*rows, k)?;
            kovalevskaya_pullback(e, k)
        }
        (Equation::Quad(q), InitialDataSpec::Cross) => cross_pullback(e, q),
        _ => Err(Error::invalid("initial-data specification does not match the equation kind")),
    }
}

/// Pullback that keeps first-order track of the defining residual: every
/// eliminated point carries the matching shift `D[a,b]` of `Δ`, so the result
/// is exact to first order in `[Δ]` around solutions.
pub fn pullback_with_delta(e: &Expr, eq: &Equation, data: &InitialDataSpec) -> Result<Expr> {
    match (eq, data) {
        (Equation::Kovalevskaya(k), InitialDataSpec::KovalevskayaRows(rows)) => {
            check_rows(*rows, k)?;
            kovalevskaya_pullback_with_delta(e, k)
        }
        (Equation::Quad(q), InitialDataSpec::Cross) => cross_pullback_with_delta(e, q),
        _ => Err(Error::invalid("initial-data specification does not match the equation kind")),
    }
}

fn check_rows(rows: i64, eq: &KovalevskayaPde) -> Result<()> {
    if rows != eq.k {
        return Err(Error::invalid(
            "initial-data row count does not match the equation order",
        ));
    }
    Ok(())
}

/// Next point to eliminate in the Kovalevskaya case: the highest row, leftmost
/// column first. Negative rows are unreachable.
fn kovalevskaya_next(e: &Expr, k: i64) -> Result<Option<LatticeVar>> {
    let mut best: Option<LatticeVar> = None;
    for v in e.lattice_vars() {
        if v.family != Family::U {
            continue;
        }
        if v.dm < 0 {
            return Err(Error::not_reachable("point lies on a negative row"));
        }
        if v.dm < k {
            continue;
        }
        best = Some(match best {
            None => v,
            Some(b) => {
                if (v.dm, -v.dn) > (b.dm, -b.dn) {
                    v
                } else {
                    b
                }
            }
        });
    }
    Ok(best)
}

/// Pullback onto the rows `0 ..= K−1`.
pub fn kovalevskaya_pullback(e: &Expr, eq: &KovalevskayaPde) -> Result<Expr> {
    let mut cur = e.clone();
    for _ in 0..MAX_STEPS {
        match kovalevskaya_next(&cur, eq.k)? {
            None => return Ok(cur),
            Some(v) => {
                let (l, t) = (v.dm - eq.k, v.dn);
                let repl = shift(&eq.omega, l, t - eq.sigma);
                cur = substitute(&cur, v, &repl);
            }
        }
    }
    Err(Error::invalid("pullback did not terminate"))
}

/// Pullback onto rows `0 ..= K−1` carrying the residual: each eliminated
/// `u[K+l, t]` becomes `D[l, t−sigma] + S_m^l S_n^{t−sigma}(omega)`.
pub fn kovalevskaya_pullback_with_delta(e: &Expr, eq: &KovalevskayaPde) -> Result<Expr> {
    let mut cur = e.clone();
    for _ in 0..MAX_STEPS {
        match kovalevskaya_next(&cur, eq.k)? {
            None => return Ok(cur),
            Some(v) => {
                let (l, t) = (v.dm - eq.k, v.dn);
                let repl = Expr::delta(l, t - eq.sigma) + shift(&eq.omega, l, t - eq.sigma);
                cur = substitute(&cur, v, &repl);
            }
        }
    }
    Err(Error::invalid("pullback did not terminate"))
}

/// Next point to eliminate on the cross: nearest to the origin first
/// (smallest `|i|+|j|`, then smallest `|j|`, then position for determinism).
fn cross_next(e: &Expr) -> Option<LatticeVar> {
    InitialDataSpec::Cross
        .off_data(e)
        .into_iter()
        .min_by_key(|v| (v.dm.abs() + v.dn.abs(), v.dn.abs(), v.dm, v.dn))
}

/// Which corner solution eliminates an off-cross point, and the shift to
/// apply to it. The point `(i,j)` is the image of that corner of the shifted
/// quad `(a,b) + [0,1]²`.
fn cross_rule(v: LatticeVar) -> Result<((i64, i64), (i64, i64))> {
    let (i, j) = (v.dm, v.dn);
    if i >= 1 && j >= 1 {
        Ok(((1, 1), (i - 1, j - 1)))
    } else if i >= 1 && j <= -1 {
        Ok(((1, 0), (i - 1, j)))
    } else if i <= -1 && j >= 2 {
        Ok(((0, 1), (i, j - 1)))
    } else if i <= -1 && j <= 0 {
        Ok(((0, 0), (i, j)))
    } else {
        // Remaining cases are on the cross; reaching here is a logic error.
        Err(Error::invalid("attempted to eliminate an initial-data point"))
    }
}

/// Pullback of an arbitrary-stencil expression onto the cross.
pub fn cross_pullback(e: &Expr, eq: &QuadGraphPde) -> Result<Expr> {
    let mut cur = e.clone();
    for _ in 0..MAX_STEPS {
        match cross_next(&cur) {
            None => return Ok(cur),
            Some(v) => {
                let (corner, (a, b)) = cross_rule(v)?;
                let repl = shift(eq.corner(corner.0, corner.1), a, b);
                cur = substitute(&cur, v, &repl);
            }
        }
    }
    Err(Error::invalid("pullback did not terminate"))
}

/// Cross pullback carrying the residual. Points eliminated through the
/// solved corner pick up `+D[a,b]`; the other three corner solutions are
/// first rewritten to solve the perturbed relation `u[1,1] = C + Δ`.
pub fn cross_pullback_with_delta(e: &Expr, eq: &QuadGraphPde) -> Result<Expr> {
    let mut cur = e.clone();
    for _ in 0..MAX_STEPS {
        match cross_next(&cur) {
            None => return Ok(cur),
            Some(v) => {
                let (corner, (a, b)) = cross_rule(v)?;
                let repl = if corner == (1, 1) {
                    Expr::delta(a, b) + shift(eq.corner(1, 1), a, b)
                } else {
                    shift(&corner_with_delta(eq.corner(corner.0, corner.1)), a, b)
                };
                cur = substitute(&cur, v, &repl);
            }
        }
    }
    Err(Error::invalid("pullback did not terminate"))
}

/// Numerically evolves a quad-graph solution from cross data: computes the
/// value at `target`, filling `pt.vars` with every intermediate point. The
/// recursion mirrors the defining relation directly and shares no code with
/// the symbolic pullback, so the two can check each other.
pub fn evolve_quad(eq: &QuadGraphPde, pt: &mut EvalPoint, target: LatticeVar) -> Result<Value> {
    if target.family != Family::U {
        return Err(Error::invalid("can only evolve u-points"));
    }
    evolve_quad_inner(eq, pt, target, 0)
}

fn evolve_quad_inner(
    eq: &QuadGraphPde,
    pt: &mut EvalPoint,
    v: LatticeVar,
    depth: usize,
) -> Result<Value> {
    if depth > 10_000 {
        return Err(Error::invalid("evolution recursion too deep"));
    }
    if let Some(r) = pt.vars.get(&v) {
        return Ok(Value::Exact(r.clone()));
    }
    if InitialDataSpec::Cross.contains(v) {
        return Err(Error::invalid("initial-data point has no assigned value"));
    }
    let (corner, (a, b)) = cross_rule(v)?;
    let expr = shift(eq.corner(corner.0, corner.1), a, b);
    for w in expr.lattice_vars() {
        evolve_quad_inner(eq, pt, w, depth + 1)?;
    }
    let value = evaluate(&expr, pt)?;
    let exact = value
        .as_exact()
        .ok_or_else(|| Error::invalid("evolution requires rational corner solutions"))?;
    pt.vars.insert(v, exact);
    Ok(value)
}

/// Numerically evolves a Kovalevskaya solution forward from its data strip.
pub fn evolve_kovalevskaya(
    eq: &KovalevskayaPde,
    pt: &mut EvalPoint,
    target: LatticeVar,
) -> Result<Value> {
    if target.family != Family::U {
        return Err(Error::invalid("can only evolve u-points"));
    }
    evolve_kov_inner(eq, pt, target, 0)
}

fn evolve_kov_inner(
    eq: &KovalevskayaPde,
    pt: &mut EvalPoint,
    v: LatticeVar,
    depth: usize,
) -> Result<Value> {
    if depth > 10_000 {
        return Err(Error::invalid("evolution recursion too deep"));
    }
    if let Some(r) = pt.vars.get(&v) {
        return Ok(Value::Exact(r.clone()));
    }
    if v.dm < 0 {
        return Err(Error::not_reachable("point lies on a negative row"));
    }
    if v.dm < eq.k {
        return Err(Error::invalid("initial-data point has no assigned value"));
    }
    let (l, t) = (v.dm - eq.k, v.dn);
    let expr = shift(&eq.omega, l, t - eq.sigma);
    for w in expr.lattice_vars() {
        evolve_kov_inner(eq, pt, w, depth + 1)?;
    }
    let value = evaluate(&expr, pt)?;
    let exact = value
        .as_exact()
        .ok_or_else(|| Error::invalid("evolution requires rational right-hand sides"))?;
    pt.vars.insert(v, exact);
    Ok(value)
}
