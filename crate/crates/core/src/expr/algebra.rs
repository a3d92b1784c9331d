//! Structural operations: shifts, substitution, differentiation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_rational::BigRational;
use num_traits::One;

use super::node::{Expr, Family, LatticeVar, Symbol};

/// Apply the lattice shift `S_m^dm S_n^dn`.
///
/// Both families of lattice variables move; the coordinates `m`, `n`, parity
/// factors, and linear-exponent powers absorb the shift into their constant
/// parts.
pub fn shift(e: &Expr, dm: i64, dn: i64) -> Expr {
    if dm == 0 && dn == 0 {
        return e.clone();
    }
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Sym(Symbol::M) => Expr::m() + Expr::int(dm),
        Expr::Sym(Symbol::N) => Expr::n() + Expr::int(dn),
        Expr::Sym(_) => e.clone(),
        Expr::Var(v) => Expr::var(LatticeVar { family: v.family, dm: v.dm + dm, dn: v.dn + dn }),
        Expr::Parity(a, b, c) => Expr::parity(
            i64::from(*a),
            i64::from(*b),
            i64::from(*c) + i64::from(*a) * dm + i64::from(*b) * dn,
        ),
        Expr::PowLin(p) => Expr::pow_lin(p.base.clone(), p.a, p.b, p.c + p.a * dm + p.b * dn),
        Expr::Sum(ts) => Expr::add(ts.iter().map(|t| shift(t, dm, dn)).collect()),
        Expr::Prod(fs) => Expr::mul(fs.iter().map(|f| shift(f, dm, dn)).collect()),
        Expr::Pow(b, k) => Expr::pow(shift(b, dm, dn), *k),
        Expr::Root(b, q) => Expr::root_pow(shift(b, dm, dn), q.clone()),
        Expr::Ln(b) => Expr::ln(shift(b, dm, dn)),
    }
}

/// Shift for expressions over a single independent variable `n`, where the
/// first lattice offset plays the role of the index: `u[i,0]` moves to
/// `u[i+t,0]` while the symbol `n` (and the `n`-part of parity and
/// linear-exponent factors) advances by `t`.
pub fn ode_shift(e: &Expr, t: i64) -> Expr {
    if t == 0 {
        return e.clone();
    }
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Sym(Symbol::N) => Expr::n() + Expr::int(t),
        Expr::Sym(_) => e.clone(),
        Expr::Var(v) => Expr::var(LatticeVar { family: v.family, dm: v.dm + t, dn: v.dn }),
        Expr::Parity(a, b, c) => {
            Expr::parity(i64::from(*a), i64::from(*b), i64::from(*c) + i64::from(*b) * t)
        }
        Expr::PowLin(p) => Expr::pow_lin(p.base.clone(), p.a, p.b, p.c + p.b * t),
        Expr::Sum(ts) => Expr::add(ts.iter().map(|x| ode_shift(x, t)).collect()),
        Expr::Prod(fs) => Expr::mul(fs.iter().map(|f| ode_shift(f, t)).collect()),
        Expr::Pow(b, k) => Expr::pow(ode_shift(b, t), *k),
        Expr::Root(b, q) => Expr::root_pow(ode_shift(b, t), q.clone()),
        Expr::Ln(b) => Expr::ln(ode_shift(b, t)),
    }
}

/// Partial derivative with respect to a lattice variable.
pub fn differentiate(e: &Expr, v: LatticeVar) -> Expr {
    match e {
        Expr::Num(_) | Expr::Sym(_) | Expr::Parity(_, _, _) | Expr::PowLin(_) => Expr::zero(),
        Expr::Var(w) => {
            if *w == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(ts) => Expr::add(ts.iter().map(|t| differentiate(t, v)).collect()),
        Expr::Prod(fs) => product_rule(fs, |g| differentiate(g, v)),
        Expr::Pow(b, k) => {
            let db = differentiate(b, v);
            if db.is_zero_expr() {
                return Expr::zero();
            }
            Expr::int(*k) * Expr::pow((**b).clone(), k - 1) * db
        }
        Expr::Root(b, q) => {
            let db = differentiate(b, v);
            if db.is_zero_expr() {
                return Expr::zero();
            }
            Expr::num(q.clone())
                * Expr::root_pow((**b).clone(), q - BigRational::one())
                * db
        }
        Expr::Ln(b) => {
            let db = differentiate(b, v);
            if db.is_zero_expr() {
                return Expr::zero();
            }
            db / (**b).clone()
        }
    }
}

/// Partial derivative with respect to a scalar symbol.
///
/// Parity and linear-exponent factors count as constants here: the lattice
/// coordinates are only ever differentiated discretely (by shifting), never as
/// continuous variables.
pub fn differentiate_sym(e: &Expr, s: &Symbol) -> Expr {
    match e {
        Expr::Num(_) | Expr::Var(_) | Expr::Parity(_, _, _) | Expr::PowLin(_) => Expr::zero(),
        Expr::Sym(t) => {
            if t == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(ts) => Expr::add(ts.iter().map(|t| differentiate_sym(t, s)).collect()),
        Expr::Prod(fs) => product_rule(fs, |g| differentiate_sym(g, s)),
        Expr::Pow(b, k) => {
            let db = differentiate_sym(b, s);
            if db.is_zero_expr() {
                return Expr::zero();
            }
            Expr::int(*k) * Expr::pow((**b).clone(), k - 1) * db
        }
        Expr::Root(b, q) => {
            let db = differentiate_sym(b, s);
            if db.is_zero_expr() {
                return Expr::zero();
            }
            Expr::num(q.clone())
                * Expr::root_pow((**b).clone(), q - BigRational::one())
                * db
        }
        Expr::Ln(b) => {
            let db = differentiate_sym(b, s);
            if db.is_zero_expr() {
                return Expr::zero();
            }
            db / (**b).clone()
        }
    }
}

fn product_rule(fs: &[Expr], d: impl Fn(&Expr) -> Expr) -> Expr {
    let mut terms = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        let df = d(f);
        if df.is_zero_expr() {
            continue;
        }
        let mut fac: Vec<Expr> = Vec::with_capacity(fs.len());
        fac.push(df);
        for (j, g) in fs.iter().enumerate() {
            if j != i {
                fac.push(g.clone());
            }
        }
        terms.push(Expr::mul(fac));
    }
    Expr::add(terms)
}

/// Replace every occurrence of one lattice variable by an expression.
pub fn substitute(e: &Expr, v: LatticeVar, repl: &Expr) -> Expr {
    let mut map = BTreeMap::new();
    map.insert(v, repl.clone());
    substitute_map(e, &map)
}

/// Simultaneously replace lattice variables according to a map.
pub fn substitute_map(e: &Expr, map: &BTreeMap<LatticeVar, Expr>) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    match e {
        Expr::Var(v) => match map.get(v) {
            Some(r) => r.clone(),
            None => e.clone(),
        },
        Expr::Num(_) | Expr::Sym(_) | Expr::Parity(_, _, _) | Expr::PowLin(_) => e.clone(),
        Expr::Sum(ts) => Expr::add(ts.iter().map(|t| substitute_map(t, map)).collect()),
        Expr::Prod(fs) => Expr::mul(fs.iter().map(|f| substitute_map(f, map)).collect()),
        Expr::Pow(b, k) => Expr::pow(substitute_map(b, map), *k),
        Expr::Root(b, q) => Expr::root_pow(substitute_map(b, map), q.clone()),
        Expr::Ln(b) => Expr::ln(substitute_map(b, map)),
    }
}

/// Replace every occurrence of a scalar symbol by an expression.
pub fn substitute_sym(e: &Expr, s: &Symbol, repl: &Expr) -> Expr {
    match e {
        Expr::Sym(t) => {
            if t == s {
                repl.clone()
            } else {
                e.clone()
            }
        }
        Expr::Num(_) | Expr::Var(_) | Expr::Parity(_, _, _) | Expr::PowLin(_) => e.clone(),
        Expr::Sum(ts) => Expr::add(ts.iter().map(|t| substitute_sym(t, s, repl)).collect()),
        Expr::Prod(fs) => Expr::mul(fs.iter().map(|f| substitute_sym(f, s, repl)).collect()),
        Expr::Pow(b, k) => Expr::pow(substitute_sym(b, s, repl), *k),
        Expr::Root(b, q) => Expr::root_pow(substitute_sym(b, s, repl), q.clone()),
        Expr::Ln(b) => Expr::ln(substitute_sym(b, s, repl)),
    }
}

/// Replace every lattice variable of one family whose offsets satisfy a
/// predicate, producing the replacement from the offsets.
pub fn substitute_where(
    e: &Expr,
    family: Family,
    pred: &impl Fn(i64, i64) -> bool,
    repl: &impl Fn(i64, i64) -> Expr,
) -> Expr {
    match e {
        Expr::Var(v) if v.family == family && pred(v.dm, v.dn) => repl(v.dm, v.dn),
        Expr::Num(_) | Expr::Sym(_) | Expr::Var(_) | Expr::Parity(_, _, _) | Expr::PowLin(_) => {
            e.clone()
        }
        Expr::Sum(ts) => {
            Expr::add(ts.iter().map(|t| substitute_where(t, family, pred, repl)).collect())
        }
        Expr::Prod(fs) => {
            Expr::mul(fs.iter().map(|f| substitute_where(f, family, pred, repl)).collect())
        }
        Expr::Pow(b, k) => Expr::pow(substitute_where(b, family, pred, repl), *k),
        Expr::Root(b, q) => Expr::root_pow(substitute_where(b, family, pred, repl), q.clone()),
        Expr::Ln(b) => Expr::ln(substitute_where(b, family, pred, repl)),
    }
}

/// Distributes products over sums (and expands small positive powers of
/// sums), so that `terms()` of the result enumerates genuine monomial-level
/// summands. Denominators, radicals, and logarithms are left in place.
pub fn expand(e: &Expr) -> Expr {
    const MAX_POW_EXPAND: i64 = 8;
    match e {
        Expr::Sum(ts) => Expr::add(ts.iter().map(expand).collect()),
        Expr::Prod(fs) => {
            let mut acc: Vec<Expr> = alloc::vec![Expr::one()];
            for f in fs {
                let fe = expand(f);
                let parts = fe.terms();
                let mut next = Vec::with_capacity(acc.len() * parts.len());
                for a in &acc {
                    for p in &parts {
                        next.push(a.clone() * p.clone());
                    }
                }
                acc = next;
            }
            Expr::add(acc)
        }
        Expr::Pow(b, k) => {
            let be = expand(b);
            if *k >= 2 && *k <= MAX_POW_EXPAND && matches!(be, Expr::Sum(_)) {
                let factors = alloc::vec![be; *k as usize];
                expand(&Expr::Prod(factors))
            } else {
                Expr::pow(be, *k)
            }
        }
        Expr::Root(b, q) => Expr::root_pow(expand(b), q.clone()),
        Expr::Ln(b) => Expr::ln(expand(b)),
        _ => e.clone(),
    }
}
