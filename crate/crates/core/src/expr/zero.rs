//! Probabilistic zero testing by evaluation at random rational points.
//!
//! Rational expressions are decided exactly; expressions containing
//! logarithms or fractional powers are evaluated in high-precision
//! fixed-point and compared against a relative tolerance scaled by the
//! largest top-level term, which keeps catastrophic cancellation between
//! huge terms from being mistaken for a nonzero residual.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::algebra::{differentiate, differentiate_sym};
use super::eval::{evaluate, EvalPoint, Value};
use super::fixed::Fx;
use super::node::{Expr, LatticeVar, Symbol};
use crate::error::{Error, Result};

/// Sampling parameters for the zero test.
#[derive(Debug, Clone)]
pub struct ZeroTestConfig {
    /// Number of successful sample points required.
    pub samples: u32,
    /// Seed for the deterministic generator.
    pub seed: u64,
    /// Requested precision in bits; 64 guard bits are added internally.
    pub precision: u32,
    /// Relative tolerance for inexact comparisons.
    pub tol: BigRational,
    /// Total budget of extra draws when a point hits a singularity.
    pub max_resamples: u32,
}

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            samples: 12,
            seed: 42,
            precision: 256,
            tol: BigRational::new(BigInt::from(1), BigInt::from(10).pow(40)),
            max_resamples: 200,
        }
    }
}

impl ZeroTestConfig {
    pub fn with_seed(seed: u64) -> Self {
        ZeroTestConfig { seed, ..Default::default() }
    }

    pub fn working_precision(&self) -> u32 {
        self.precision + 64
    }
}

/// Deterministic source of random evaluation points.
#[derive(Debug)]
pub struct PointSampler {
    rng: ChaCha8Rng,
    prec: u32,
}

impl PointSampler {
    pub fn new(cfg: &ZeroTestConfig) -> PointSampler {
        PointSampler { rng: ChaCha8Rng::seed_from_u64(cfg.seed), prec: cfg.working_precision() }
    }

    fn nonzero_small(&mut self) -> i64 {
        // Uniform over [-12,-1] ∪ [1,12].
        let k = (self.rng.next_u64() % 24) as i64 - 12;
        if k >= 0 {
            k + 1
        } else {
            k
        }
    }

    /// A small nonzero rational sample value.
    pub fn rational(&mut self) -> BigRational {
        let num = self.nonzero_small();
        let den = (self.rng.next_u64() % 12) as i64 + 1;
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Draw an assignment for the given symbols and lattice variables.
    pub fn draw(&mut self, syms: &BTreeSet<Symbol>, vars: &BTreeSet<LatticeVar>) -> EvalPoint {
        let mut at = EvalPoint::new(self.prec);
        at.m = self.nonzero_small();
        at.n = self.nonzero_small();
        for s in syms {
            if matches!(s, Symbol::M | Symbol::N) {
                continue;
            }
            at.syms.insert(s.clone(), self.rational());
        }
        for v in vars {
            at.vars.insert(*v, self.rational());
        }
        at
    }
}

fn eval_with_scale(e: &Expr, at: &EvalPoint) -> Result<(Value, Fx)> {
    let prec = at.prec;
    let one = Fx::from_int(1, prec);
    match e {
        Expr::Sum(ts) => {
            let mut acc = Fx::zero(prec);
            let mut scale = one;
            let mut exact_acc = Some(BigRational::zero());
            for t in ts {
                let v = evaluate(t, at)?;
                let f = v.to_fx(prec);
                if scale.cmp_abs(&f) == Ordering::Less {
                    scale = f.abs();
                }
                acc = acc.add(&f);
                exact_acc = match (exact_acc, v) {
                    (Some(a), Value::Exact(r)) => Some(a + r),
                    _ => None,
                };
            }
            match exact_acc {
                Some(r) => Ok((Value::Exact(r), scale)),
                None => Ok((Value::Approx(acc), scale)),
            }
        }
        other => {
            let v = evaluate(other, at)?;
            let f = v.to_fx(prec).abs();
            let scale = if one.cmp_abs(&f) == Ordering::Less { f } else { one };
            Ok((v, scale))
        }
    }
}

/// Decide whether an expression vanishes identically in all its unknowns.
pub fn is_zero(e: &Expr, cfg: &ZeroTestConfig) -> Result<bool> {
    if e.is_zero_expr() {
        return Ok(true);
    }
    let syms = e.symbols();
    let vars = e.lattice_vars();
    let prec = cfg.working_precision();
    let tol = Fx::from_rational(&cfg.tol, prec);
    let mut sampler = PointSampler::new(cfg);
    let mut resamples_left = cfg.max_resamples;
    let mut done = 0u32;
    while done < cfg.samples {
        let at = sampler.draw(&syms, &vars);
        match eval_with_scale(e, &at) {
            Err(Error::Domain { .. }) => {
                if resamples_left == 0 {
                    return Err(Error::SamplingExhausted {
                        attempts: cfg.samples + cfg.max_resamples,
                    });
                }
                resamples_left -= 1;
            }
            Err(other) => return Err(other),
            Ok((value, scale)) => {
                match value {
                    Value::Exact(r) => {
                        if !r.is_zero() {
                            return Ok(false);
                        }
                    }
                    Value::Approx(f) => {
                        let threshold = tol.mul(&scale);
                        if f.cmp_abs(&threshold) == Ordering::Greater {
                            return Ok(false);
                        }
                    }
                }
                done += 1;
            }
        }
    }
    Ok(true)
}

/// Semantic equality of two expressions.
pub fn exprs_equal(a: &Expr, b: &Expr, cfg: &ZeroTestConfig) -> Result<bool> {
    if a == b {
        return Ok(true);
    }
    is_zero(&(a.clone() - b.clone()), cfg)
}

/// Whether the expression genuinely depends on a lattice variable
/// (derivative not identically zero).
pub fn depends_on(e: &Expr, v: LatticeVar, cfg: &ZeroTestConfig) -> Result<bool> {
    let d = differentiate(e, v);
    Ok(!is_zero(&d, cfg)?)
}

/// Whether the expression genuinely depends on a scalar symbol.
pub fn depends_on_sym(e: &Expr, s: &Symbol, cfg: &ZeroTestConfig) -> Result<bool> {
    let d = differentiate_sym(e, s);
    Ok(!is_zero(&d, cfg)?)
}

/// The lattice variables an expression genuinely depends on.
pub fn dependencies(e: &Expr, cfg: &ZeroTestConfig) -> Result<Vec<LatticeVar>> {
    let mut out = Vec::new();
    for v in e.lattice_vars() {
        if depends_on(e, v, cfg)? {
            out.push(v);
        }
    }
    Ok(out)
}
