//! Arbitrary-precision binary fixed-point arithmetic.
//!
//! A value is `mant / 2^prec` with a big-integer mantissa. This is enough to
//! evaluate expressions containing square roots and logarithms to hundreds of
//! bits, which the probabilistic zero test needs; there is no rounding-mode
//! subtlety because every operation truncates and callers carry guard bits.

use core::cmp::Ordering;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fx {
    pub mant: BigInt,
    pub prec: u32,
}

impl Fx {
    pub fn zero(prec: u32) -> Fx {
        Fx { mant: BigInt::zero(), prec }
    }

    pub fn from_int(k: i64, prec: u32) -> Fx {
        Fx { mant: BigInt::from(k) << prec, prec }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Fx {
        Fx { mant: (r.numer() << prec).div_floor(r.denom()), prec }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn abs(&self) -> Fx {
        Fx { mant: self.mant.abs(), prec: self.prec }
    }

    pub fn neg(&self) -> Fx {
        Fx { mant: -&self.mant, prec: self.prec }
    }

    pub fn add(&self, other: &Fx) -> Fx {
        debug_assert_eq!(self.prec, other.prec);
        Fx { mant: &self.mant + &other.mant, prec: self.prec }
    }

    pub fn sub(&self, other: &Fx) -> Fx {
        debug_assert_eq!(self.prec, other.prec);
        Fx { mant: &self.mant - &other.mant, prec: self.prec }
    }

    pub fn mul(&self, other: &Fx) -> Fx {
        debug_assert_eq!(self.prec, other.prec);
        Fx { mant: shr_round(&self.mant * &other.mant, self.prec), prec: self.prec }
    }

    pub fn div(&self, other: &Fx) -> Result<Fx> {
        debug_assert_eq!(self.prec, other.prec);
        if other.mant.is_zero() {
            return Err(Error::domain("division by zero in numeric evaluation"));
        }
        Ok(Fx { mant: (&self.mant << self.prec).div_floor(&other.mant), prec: self.prec })
    }

    pub fn recip(&self) -> Result<Fx> {
        Fx::from_int(1, self.prec).div(self)
    }

    /// Integer power by repeated squaring; negative exponents via reciprocal.
    pub fn pow_int(&self, k: i64) -> Result<Fx> {
        if k == 0 {
            return Ok(Fx::from_int(1, self.prec));
        }
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Fx::from_int(1, self.prec);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Square root of a non-negative value.
    pub fn sqrt(&self) -> Result<Fx> {
        if self.mant.is_negative() {
            return Err(Error::domain("square root of a negative value"));
        }
        Ok(Fx { mant: (&self.mant << self.prec).sqrt(), prec: self.prec })
    }

    /// Natural logarithm of a positive value.
    ///
    /// Splits off the binary exponent (`x = 2^e · z`, `z ∈ [1,2)`) and sums
    /// the `atanh` series for `ln z`, with `ln 2 = 2 atanh(1/3)`.
    pub fn ln(&self) -> Result<Fx> {
        if !self.mant.is_positive() {
            return Err(Error::domain("logarithm of a non-positive value"));
        }
        let prec = self.prec;
        let bits = self.mant.bits() as i64;
        let e = bits - 1 - i64::from(prec);
        // z mantissa at the same precision: mant / 2^e.
        let z = Fx {
            mant: if e >= 0 { &self.mant >> (e as u32) } else { &self.mant << ((-e) as u32) },
            prec,
        };
        let one = Fx::from_int(1, prec);
        let t = z.sub(&one).div(&z.add(&one))?;
        let mut out = atanh(&t);
        out.mant <<= 1;
        if e != 0 {
            let ln2 = ln2(prec);
            out = out.add(&Fx { mant: ln2.mant * BigInt::from(e), prec });
        }
        Ok(out)
    }

    /// The exact rational value `mant / 2^prec`.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mant.clone(), BigInt::from(1) << self.prec)
    }

    pub fn cmp_abs(&self, other: &Fx) -> Ordering {
        debug_assert_eq!(self.prec, other.prec);
        self.mant.abs().cmp(&other.mant.abs())
    }
}

fn shr_round(x: BigInt, k: u32) -> BigInt {
    // Truncation toward negative infinity keeps errors one-sided and below
    // one unit in the last place.
    x >> k
}

/// `ln 2` via `2·atanh(1/3)`.
/// Recovers a small rational from a high-precision approximation by
/// truncating its continued-fraction expansion at the first huge partial
/// quotient. Returns `None` when no convergent with denominator at most
/// `max_den` explains the value. Callers must verify the candidate
/// independently; this is a guess, not a proof.
pub fn rational_reconstruct(x: &Fx, max_den: &BigInt) -> Option<BigRational> {
    let target = x.to_rational();
    // A partial quotient this large signals that the previous convergent
    // already matches to within the working precision.
    let huge = BigInt::from(1) << (x.prec / 2).max(16);
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::zero());
    let (mut p1, mut q1) = (target.numer().div_floor(target.denom()), BigInt::from(1));
    let mut frac = &target - BigRational::from_integer(p1.clone());
    for _ in 0..256 {
        if frac.is_zero() {
            return Some(BigRational::new(p1, q1));
        }
        let inv = frac.recip();
        let a = inv.numer().div_floor(inv.denom());
        if a >= huge {
            return Some(BigRational::new(p1, q1));
        }
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > max_den {
            return None;
        }
        frac = inv - BigRational::from_integer(a);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    None
}

pub fn ln2(prec: u32) -> Fx {
    let third = Fx::from_rational(&BigRational::new(BigInt::from(1), BigInt::from(3)), prec);
    let mut out = atanh(&third);
    out.mant <<= 1;
    out
}

/// `atanh(t) = t + t³/3 + t⁵/5 + …` for `|t| < 1`; callers pass `|t| ≤ 1/3`,
/// so the series gains more than three bits per term.
fn atanh(t: &Fx) -> Fx {
    let prec = t.prec;
    let t2 = t.mul(t);
    let mut term = t.clone();
    let mut sum = Fx::zero(prec);
    let mut k: u32 = 1;
    loop {
        let contrib = Fx { mant: term.mant.div_floor(&BigInt::from(k)), prec };
        if contrib.mant.is_zero() {
            break;
        }
        sum = sum.add(&contrib);
        term = term.mul(&t2);
        if term.mant.is_zero() {
            break;
        }
        k += 2;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Fx, expected: f64) {
        // Compare through f64 with a loose bound; dedicated precision checks
        // are done at higher level against exact identities.
        let approx = {
            use num_traits::ToPrimitive;
            let scaled = &a.mant >> (a.prec - 64);
            scaled.to_f64().unwrap() / (2f64).powi(64)
        };
        assert!(
            (approx - expected).abs() < 1e-12,
            "got {approx}, expected {expected}"
        );
    }

    #[test]
    fn ln_matches_known_values() {
        let prec = 192;
        close(&Fx::from_int(2, prec).ln().unwrap(), core::f64::consts::LN_2);
        close(&Fx::from_int(1, prec).ln().unwrap(), 0.0);
        close(&Fx::from_int(10, prec).ln().unwrap(), core::f64::consts::LN_10);
        let half = Fx::from_rational(&BigRational::new(BigInt::from(1), BigInt::from(2)), prec);
        close(&half.ln().unwrap(), -core::f64::consts::LN_2);
    }

    #[test]
    fn ln_of_product_is_sum_of_lns() {
        let prec = 256;
        let a = Fx::from_rational(&BigRational::new(BigInt::from(7), BigInt::from(3)), prec);
        let b = Fx::from_rational(&BigRational::new(BigInt::from(11), BigInt::from(5)), prec);
        let lhs = a.mul(&b).ln().unwrap();
        let rhs = a.ln().unwrap().add(&b.ln().unwrap());
        let diff = lhs.sub(&rhs).abs();
        // Allow a few ulps of truncation noise.
        assert!(diff.mant < BigInt::from(1) << 16, "diff mantissa {}", diff.mant);
    }

    #[test]
    fn sqrt_squares_back() {
        let prec = 256;
        let x = Fx::from_rational(&BigRational::new(BigInt::from(13), BigInt::from(7)), prec);
        let s = x.sqrt().unwrap();
        let back = s.mul(&s);
        let diff = back.sub(&x).abs();
        assert!(diff.mant < BigInt::from(1) << 16);
    }

    #[test]
    fn pow_int_handles_negatives() {
        let prec = 192;
        let x = Fx::from_int(3, prec);
        let inv9 = x.pow_int(-2).unwrap();
        let nine = Fx::from_int(9, prec);
        let diff = inv9.mul(&nine).sub(&Fx::from_int(1, prec)).abs();
        assert!(diff.mant < BigInt::from(1) << 8);
    }
}
