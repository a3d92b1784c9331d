//! Truncated power series in the formal parameter ε.
//!
//! Coefficients are ordinary [`Expr`] values (ε itself never appears inside
//! them); the series is represented densely as `coeffs[i] · ε^i`. Everything
//! is truncated: an `EpsSeries` of order `N` carries coefficients for
//! `ε^0 ..= ε^N` and all arithmetic discards higher powers.

use alloc::{vec, vec::Vec};

use crate::error::{Error, Result};
use crate::expr::Expr;

/// Default truncation order used when callers do not specify one.
pub const DEFAULT_TRUNCATION_ORDER: usize = 5;

/// A truncated power series `Σ_{i=0}^{order} coeffs[i] ε^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsSeries {
    coeffs: Vec<Expr>,
}

impl EpsSeries {
    /// The zero series at the given truncation order.
    pub fn zero(order: usize) -> Self {
        EpsSeries { coeffs: vec![Expr::zero(); order + 1] }
    }

    /// Builds a series from explicit coefficients (`coeffs[i]` multiplies ε^i).
    pub fn from_coeffs(coeffs: Vec<Expr>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the ε^0 coefficient");
        EpsSeries { coeffs }
    }

    /// Truncation order (highest retained power of ε).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of ε^i (zero beyond the truncation order).
    pub fn coeff(&self, i: usize) -> Expr {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Expr::zero())
    }

    /// All retained coefficients, lowest power first.
    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    /// Re-truncates to `order` (extending with zeros if needed).
    pub fn truncated(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Expr::zero());
        coeffs.truncate(order + 1);
        EpsSeries { coeffs }
    }

    /// Termwise sum; the result keeps the smaller truncation order.
    pub fn add(&self, other: &EpsSeries) -> Self {
        let order = self.order().min(other.order());
        let coeffs =
            (0..=order).map(|i| self.coeff(i) + other.coeff(i)).collect();
        EpsSeries { coeffs }
    }

    /// Multiplies every coefficient by a fixed expression.
    pub fn scale(&self, factor: &Expr) -> Self {
        EpsSeries {
            coeffs: self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect(),
        }
    }

    /// Applies an expression-to-expression map to every coefficient.
    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        EpsSeries { coeffs: self.coeffs.iter().map(|c| f(c)).collect() }
    }
}

/// Cauchy product of two truncated series; the result is truncated to the
/// smaller of the two orders.
pub fn series_mul(a: &EpsSeries, b: &EpsSeries) -> EpsSeries {
    let order = a.order().min(b.order());
    let mut coeffs = vec![Expr::zero(); order + 1];
    for k in 0..=order {
        let mut acc = Expr::zero();
        for i in 0..=k {
            acc = acc + a.coeff(i) * b.coeff(k - i);
        }
        coeffs[k] = acc;
    }
    EpsSeries { coeffs }
}

/// `log(1 + s)` for a series `s` with zero constant term (Mercator series,
/// truncated to `s`'s order). Errors with [`Error::NonzeroConstantTerm`] if
/// `s(0) ≠ 0` structurally.
pub fn series_log1p(s: &EpsSeries) -> Result<EpsSeries> {
    if !s.coeff(0).is_zero_expr() {
        return Err(Error::NonzeroConstantTerm);
    }
    let order = s.order();
    // log(1+s) = Σ_{k≥1} (−1)^{k+1} s^k / k. Since s has ε-valuation ≥ 1,
    // powers beyond s^order cannot contribute below the truncation order.
    let mut result = EpsSeries::zero(order);
    let mut power = s.clone(); // s^k, starting at k = 1
    for k in 1..=order.max(1) {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let coeff = Expr::rat(sign, k as i64);
        result = result.add(&power.scale(&coeff));
        if k < order {
            power = series_mul(&power, s);
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero, parse, ZeroTestConfig};

    fn e(src: &str) -> Expr {
        parse(src).unwrap()
    }

    #[test]
    fn log1p_of_linear_term() {
        let x = e("u[0,0]");
        let s = EpsSeries::from_coeffs(vec![Expr::zero(), x.clone(), Expr::zero(), Expr::zero()]);
        let out = series_log1p(&s).unwrap();
        let cfg = ZeroTestConfig::default();
        assert!(is_zero(&(out.coeff(1) - x.clone()), &cfg).unwrap());
        assert!(is_zero(&(out.coeff(2) + Expr::rat(1, 2) * x.clone() * x.clone()), &cfg).unwrap());
        assert!(is_zero(
            &(out.coeff(3) - Expr::rat(1, 3) * x.clone() * x.clone() * x.clone()),
            &cfg
        )
        .unwrap());
    }

    #[test]
    fn log1p_rejects_nonzero_constant_term() {
        let s = EpsSeries::from_coeffs(vec![Expr::one(), e("u[0,0]")]);
        assert!(matches!(series_log1p(&s), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn mul_truncates_to_smaller_order() {
        let a = EpsSeries::from_coeffs(vec![Expr::one(), e("u[0,0]"), e("u[1,0]")]);
        let b = EpsSeries::from_coeffs(vec![Expr::one(), e("m")]);
        let p = series_mul(&a, &b);
        assert_eq!(p.order(), 1);
        let cfg = ZeroTestConfig::default();
        assert!(is_zero(&(p.coeff(1) - e("u[0,0] + m")), &cfg).unwrap());
    }

    #[test]
    fn exp_log_consistency_coefficientwise() {
        // d/dε log(1+s) · (1+s) = ds/dε as truncated series: check the
        // equivalent convolution identity (k+1)·s_{k+1} = Σ over the product.
        let s = EpsSeries::from_coeffs(vec![
            Expr::zero(),
            e("u[0,0]"),
            e("u[1,0]"),
            e("u[0,1]"),
            e("m"),
        ]);
        let l = series_log1p(&s).unwrap();
        // Differentiate termwise in ε: coeff k of l' is (k+1)·l_{k+1}.
        let lp = EpsSeries::from_coeffs(
            (0..l.order()).map(|k| Expr::int((k + 1) as i64) * l.coeff(k + 1)).collect(),
        );
        let sp = EpsSeries::from_coeffs(
            (0..s.order()).map(|k| Expr::int((k + 1) as i64) * s.coeff(k + 1)).collect(),
        );
        let one_plus_s = s.add(&EpsSeries::from_coeffs(vec![Expr::one()]).truncated(s.order()));
        let lhs = series_mul(&lp, &one_plus_s.truncated(lp.order()));
        let cfg = ZeroTestConfig::default();
        for k in 0..=lhs.order() {
            assert!(
                is_zero(&(lhs.coeff(k) - sp.coeff(k)), &cfg).unwrap(),
                "mismatch at ε^{k}"
            );
        }
    }
}
