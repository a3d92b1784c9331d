//! Display of expressions in the same grammar the parser accepts.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::node::{Expr, Family, PowLin};

const LVL_SUM: u8 = 0;
const LVL_PROD: u8 = 1;
const LVL_FACTOR: u8 = 2;
const LVL_POW: u8 = 3;
const LVL_ATOM: u8 = 4;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Num(r) => {
            if r.is_integer() && !r.is_negative() {
                LVL_ATOM
            } else {
                LVL_PROD
            }
        }
        Expr::Sym(_) | Expr::Var(_) | Expr::Parity(_, _, _) | Expr::Ln(_) | Expr::Root(_, _) => {
            LVL_ATOM
        }
        Expr::PowLin(_) | Expr::Pow(_, _) => LVL_POW,
        Expr::Prod(_) => LVL_PROD,
        Expr::Sum(_) => LVL_SUM,
    }
}

fn fmt_at(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(e) < min {
        write!(f, "(")?;
        fmt_raw(e, f)?;
        write!(f, ")")
    } else {
        fmt_raw(e, f)
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// If the term carries a negative rational coefficient, return its negation.
fn negated_term(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Num(r) if r.is_negative() => Some(Expr::Num(-r)),
        Expr::Prod(fs) => match fs.first() {
            Some(Expr::Num(r)) if r.is_negative() => {
                let coeff = -r;
                let rest: Vec<Expr> = fs[1..].to_vec();
                if coeff.is_one() {
                    if rest.len() == 1 {
                        Some(rest.into_iter().next().expect("length checked"))
                    } else {
                        Some(Expr::Prod(rest))
                    }
                } else {
                    let mut out = Vec::with_capacity(fs.len());
                    out.push(Expr::Num(coeff));
                    out.extend(rest);
                    Some(Expr::Prod(out))
                }
            }
            _ => None,
        },
        _ => None,
    }
}

fn fmt_linear(a: i64, b: i64, c: i64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut wrote = false;
    for (coeff, name) in [(a, "m"), (b, "n")] {
        if coeff == 0 {
            continue;
        }
        if wrote {
            write!(f, "{}", if coeff > 0 { "+" } else { "-" })?;
        } else if coeff < 0 {
            write!(f, "-")?;
        }
        if coeff.abs() != 1 {
            write!(f, "{}*", coeff.abs())?;
        }
        write!(f, "{name}")?;
        wrote = true;
    }
    if c != 0 || !wrote {
        if wrote {
            write!(f, "{}{}", if c >= 0 { "+" } else { "-" }, c.abs())?;
        } else {
            write!(f, "{c}")?;
        }
    }
    Ok(())
}

fn fmt_powlin(p: &PowLin, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.base.is_integer() {
        write!(f, "{}", p.base.numer())?;
    } else {
        write!(f, "(")?;
        fmt_rational(&p.base, f)?;
        write!(f, ")")?;
    }
    write!(f, "^(")?;
    fmt_linear(p.a, p.b, p.c, f)?;
    write!(f, ")")
}

fn fmt_raw(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Num(r) => fmt_rational(r, f),
        Expr::Sym(s) => write!(f, "{}", s.name()),
        Expr::Var(v) => {
            let fam = match v.family {
                Family::U => "u",
                Family::Delta => "D",
            };
            write!(f, "{fam}[{},{}]", v.dm, v.dn)
        }
        Expr::Parity(a, b, c) => write!(f, "parity({a},{b},{c})"),
        Expr::PowLin(p) => fmt_powlin(p, f),
        Expr::Sum(ts) => {
            for (i, t) in ts.iter().enumerate() {
                match negated_term(t) {
                    Some(abs) => {
                        write!(f, "{}", if i == 0 { "-" } else { " - " })?;
                        fmt_at(&abs, LVL_PROD, f)?;
                    }
                    None => {
                        if i > 0 {
                            write!(f, " + ")?;
                        }
                        fmt_at(t, LVL_PROD, f)?;
                    }
                }
            }
            Ok(())
        }
        Expr::Prod(fs) => {
            let (coeff, rest) = match fs.first() {
                Some(Expr::Num(r)) => (Some(r), &fs[1..]),
                _ => (None, &fs[..]),
            };
            let mut need_star = false;
            if let Some(r) = coeff {
                if *r == -BigRational::one() {
                    write!(f, "-")?;
                } else {
                    fmt_rational(r, f)?;
                    need_star = true;
                }
            }
            for g in rest {
                if need_star {
                    write!(f, "*")?;
                }
                fmt_at(g, LVL_FACTOR, f)?;
                need_star = true;
            }
            Ok(())
        }
        Expr::Pow(b, k) => {
            fmt_at(b, LVL_ATOM, f)?;
            write!(f, "^{k}")
        }
        Expr::Root(b, q) => {
            let p = q.numer().to_i64();
            match p {
                Some(p) if *q.denom() == 2.into() => {
                    write!(f, "sqrt(")?;
                    if p == 1 {
                        fmt_at(b, LVL_SUM, f)?;
                    } else {
                        fmt_at(b, LVL_ATOM, f)?;
                        write!(f, "^{p}")?;
                    }
                    write!(f, ")")
                }
                _ => {
                    // Not expressible in the surface grammar; print something
                    // readable anyway.
                    write!(f, "(")?;
                    fmt_raw(b, f)?;
                    write!(f, ")^(")?;
                    fmt_rational(q, f)?;
                    write!(f, ")")
                }
            }
        }
        Expr::Ln(b) => {
            write!(f, "ln(")?;
            fmt_at(b, LVL_SUM, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_at(self, LVL_SUM, f)
    }
}

impl Expr {
    pub fn to_text(&self) -> String {
        use alloc::string::ToString;
        self.to_string()
    }
}
