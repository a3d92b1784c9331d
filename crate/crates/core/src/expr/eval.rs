//! Numeric evaluation of expressions at a sample point.
//!
//! Evaluation stays exact (big rationals) as long as possible and promotes to
//! fixed-point only when a logarithm or fractional power is hit, so the zero
//! test can run fully exactly on rational expressions.

use alloc::collections::BTreeMap;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::fixed::Fx;
use super::node::{rational_pow, Expr, LatticeVar, Symbol};
use crate::error::{Error, Result};

/// An assignment of numeric values to every unknown an expression mentions.
#[derive(Debug, Clone)]
pub struct EvalPoint {
    pub m: i64,
    pub n: i64,
    pub syms: BTreeMap<Symbol, BigRational>,
    pub vars: BTreeMap<LatticeVar, BigRational>,
    /// Working precision in bits for inexact subexpressions.
    pub prec: u32,
}

impl EvalPoint {
    pub fn new(prec: u32) -> EvalPoint {
        EvalPoint { m: 0, n: 0, syms: BTreeMap::new(), vars: BTreeMap::new(), prec }
    }
}

/// Result of evaluating one expression.
#[derive(Debug, Clone)]
pub enum Value {
    Exact(BigRational),
    Approx(Fx),
}

impl Value {
    pub fn to_fx(&self, prec: u32) -> Fx {
        match self {
            Value::Exact(r) => Fx::from_rational(r, prec),
            Value::Approx(f) => f.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(f) => f.is_zero(),
        }
    }

    /// The exact rational value, if evaluation never left the exact path.
    pub fn as_exact(&self) -> Option<BigRational> {
        match self {
            Value::Exact(r) => Some(r.clone()),
            Value::Approx(_) => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_negative(),
            Value::Approx(f) => f.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_positive(),
            Value::Approx(f) => f.is_positive(),
        }
    }
}

fn add(a: Value, b: Value, prec: u32) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(x + y),
        (x, y) => Value::Approx(x.to_fx(prec).add(&y.to_fx(prec))),
    }
}

fn mul(a: Value, b: Value, prec: u32) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(x * y),
        (x, y) => Value::Approx(x.to_fx(prec).mul(&y.to_fx(prec))),
    }
}

pub fn evaluate(e: &Expr, at: &EvalPoint) -> Result<Value> {
    let prec = at.prec;
    match e {
        Expr::Num(r) => Ok(Value::Exact(r.clone())),
        Expr::Sym(Symbol::M) => Ok(Value::Exact(BigRational::from_integer(at.m.into()))),
        Expr::Sym(Symbol::N) => Ok(Value::Exact(BigRational::from_integer(at.n.into()))),
        Expr::Sym(s) => at
            .syms
            .get(s)
            .map(|r| Value::Exact(r.clone()))
            .ok_or_else(|| Error::invalid("unbound symbol in evaluation")),
        Expr::Var(v) => at
            .vars
            .get(v)
            .map(|r| Value::Exact(r.clone()))
            .ok_or_else(|| Error::invalid("unbound lattice variable in evaluation")),
        Expr::Parity(a, b, c) => {
            let exp = i64::from(*a) * at.m + i64::from(*b) * at.n + i64::from(*c);
            Ok(Value::Exact(if exp.rem_euclid(2) == 0 {
                BigRational::one()
            } else {
                -BigRational::one()
            }))
        }
        Expr::PowLin(p) => {
            let exp = p.a * at.m + p.b * at.n + p.c;
            Ok(Value::Exact(rational_pow(&p.base, exp)))
        }
        Expr::Sum(ts) => {
            let mut acc = Value::Exact(BigRational::zero());
            for t in ts {
                acc = add(acc, evaluate(t, at)?, prec);
            }
            Ok(acc)
        }
        Expr::Prod(fs) => {
            let mut acc = Value::Exact(BigRational::one());
            for f in fs {
                let v = evaluate(f, at)?;
                acc = mul(acc, v, prec);
            }
            Ok(acc)
        }
        Expr::Pow(b, k) => {
            let v = evaluate(b, at)?;
            match v {
                Value::Exact(r) => {
                    if r.is_zero() {
                        if *k < 0 {
                            return Err(Error::domain("zero raised to a negative power"));
                        }
                        return Ok(Value::Exact(BigRational::zero()));
                    }
                    Ok(Value::Exact(rational_pow(&r, *k)))
                }
                Value::Approx(f) => {
                    if f.is_zero() && *k < 0 {
                        return Err(Error::domain("zero raised to a negative power"));
                    }
                    Ok(Value::Approx(f.pow_int(*k)?))
                }
            }
        }
        Expr::Root(b, q) => {
            let v = evaluate(b, at)?;
            if v.is_negative() {
                return Err(Error::domain("fractional power of a negative value"));
            }
            let two = num_bigint::BigInt::from(2);
            if *q.denom() != two {
                return Err(Error::domain("only half-integer powers are evaluated"));
            }
            let f = v.to_fx(prec);
            let s = f.sqrt()?;
            use num_traits::ToPrimitive;
            let p = q
                .numer()
                .to_i64()
                .ok_or_else(|| Error::invalid("fractional exponent out of range"))?;
            if p < 0 && s.is_zero() {
                return Err(Error::domain("zero raised to a negative power"));
            }
            Ok(Value::Approx(s.pow_int(p)?))
        }
        Expr::Ln(b) => {
            // Evaluated as ln|·|: identities built from logarithms cancel
            // multiplicatively (Σ cᵢ ln fᵢ = 0 ⟺ Π fᵢ^cᵢ = 1), so the
            // absolute value keeps every sign branch testable while only the
            // true singularity at zero remains a domain error.
            let v = evaluate(b, at)?;
            if v.is_zero() {
                return Err(Error::domain("logarithm of zero"));
            }
            let f = v.to_fx(prec);
            Ok(Value::Approx(f.abs().ln()?))
        }
    }
}
