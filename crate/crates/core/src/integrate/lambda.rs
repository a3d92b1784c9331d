//! Definite integration over λ ∈ [0,1] of integrands that are rational in λ
//! with arbitrary expression coefficients.
//!
//! The integrand is normalized to `N(λ) / Π_i (λ + b_i)^{k_i}` with a dense
//! polynomial numerator and monic linear denominator factors (each `b_i` an
//! expression free of λ). Denominators that are not products of λ-linear
//! factors are rejected as unsupported; factors vanishing at an endpoint of
//! the interval make the integrand singular.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::zero::{is_zero, ZeroTestConfig};
use crate::expr::{Expr, Symbol};

/// `N(λ) / Π (λ + b)^k`; `num[i]` multiplies `λ^i`.
#[derive(Debug, Clone)]
struct RatL {
    num: Vec<Expr>,
    den: Vec<(Expr, u32)>,
}

fn contains_lambda(e: &Expr) -> bool {
    e.symbols().contains(&Symbol::Lambda)
}

// -- dense polynomial helpers (coefficients are expressions) --

fn poly_add(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Expr::zero);
            let y = b.get(i).cloned().unwrap_or_else(Expr::zero);
            x + y
        })
        .collect()
}

fn poly_mul(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    if a.is_empty() || b.is_empty() {
        return vec![Expr::zero()];
    }
    let mut out = vec![Expr::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero_expr() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero_expr() {
                continue;
            }
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

fn poly_scale(a: &[Expr], c: &Expr) -> Vec<Expr> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

/// Horner evaluation `N(x)`.
fn poly_eval(a: &[Expr], x: &Expr) -> Expr {
    let mut acc = Expr::zero();
    for c in a.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// Synthetic division of `N` by `(λ + b)`: returns `(quotient, remainder)`
/// with `N = (λ+b)·Q + R`.
fn poly_divide_linear(n: &[Expr], b: &Expr) -> (Vec<Expr>, Expr) {
    if n.len() <= 1 {
        return (vec![], n.first().cloned().unwrap_or_else(Expr::zero));
    }
    let d = n.len() - 1;
    let mut q = vec![Expr::zero(); d];
    q[d - 1] = n[d].clone();
    for i in (1..d).rev() {
        q[i - 1] = n[i].clone() - b.clone() * q[i].clone();
    }
    let r = n[0].clone() - b.clone() * q[0].clone();
    (q, r)
}

/// Trims semantically-zero leading coefficients to expose the true degree.
fn poly_trim(n: &[Expr], cfg: &ZeroTestConfig) -> Result<Vec<Expr>> {
    let mut out = n.to_vec();
    while out.len() > 1 {
        if is_zero(out.last().expect("nonempty"), cfg)? {
            out.pop();
        } else {
            break;
        }
    }
    Ok(out)
}

impl RatL {
    fn constant(e: &Expr) -> RatL {
        RatL { num: vec![e.clone()], den: vec![] }
    }

    fn den_poly(&self) -> Vec<Expr> {
        let mut p = vec![Expr::one()];
        for (b, k) in &self.den {
            for _ in 0..*k {
                p = poly_mul(&p, &[b.clone(), Expr::one()]);
            }
        }
        p
    }

    fn add(&self, other: &RatL, cfg: &ZeroTestConfig) -> Result<RatL> {
        // Least common denominator by matching factors semantically.
        let mut merged: Vec<(Expr, u32, u32)> =
            self.den.iter().map(|(b, k)| (b.clone(), *k, 0)).collect();
        for (b, k) in &other.den {
            let mut found = false;
            for m in merged.iter_mut() {
                if is_zero(&(m.0.clone() - b.clone()), cfg)? {
                    m.2 = *k;
                    found = true;
                    break;
                }
            }
            if !found {
                merged.push((b.clone(), 0, *k));
            }
        }
        let mut comp_a = vec![Expr::one()];
        let mut comp_b = vec![Expr::one()];
        let mut den = Vec::new();
        for (b, ka, kb) in merged {
            let k = ka.max(kb);
            for _ in 0..(k - ka) {
                comp_a = poly_mul(&comp_a, &[b.clone(), Expr::one()]);
            }
            for _ in 0..(k - kb) {
                comp_b = poly_mul(&comp_b, &[b.clone(), Expr::one()]);
            }
            den.push((b, k));
        }
        let num = poly_add(&poly_mul(&self.num, &comp_a), &poly_mul(&other.num, &comp_b));
        Ok(RatL { num, den })
    }

    fn mul(&self, other: &RatL, cfg: &ZeroTestConfig) -> Result<RatL> {
        let num = poly_mul(&self.num, &other.num);
        let mut den = self.den.clone();
        for (b, k) in &other.den {
            let mut found = false;
            for d in den.iter_mut() {
                if is_zero(&(d.0.clone() - b.clone()), cfg)? {
                    d.1 += k;
                    found = true;
                    break;
                }
            }
            if !found {
                den.push((b.clone(), *k));
            }
        }
        Ok(RatL { num, den })
    }

    fn invert(&self, cfg: &ZeroTestConfig) -> Result<RatL> {
        let num = poly_trim(&self.num, cfg)?;
        let flipped = self.den_poly();
        match num.len() {
            1 => {
                if num[0].is_zero_expr() {
                    return Err(Error::domain("division by a vanishing integrand"));
                }
                let inv = Expr::pow(num[0].clone(), -1);
                Ok(RatL { num: poly_scale(&flipped, &inv), den: vec![] })
            }
            2 => {
                // (a1 λ + a0)⁻¹ = a1⁻¹ (λ + a0/a1)⁻¹.
                let a0 = num[0].clone();
                let a1 = num[1].clone();
                let inv = Expr::pow(a1.clone(), -1);
                let root = a0 * inv.clone();
                Ok(RatL { num: poly_scale(&flipped, &inv), den: vec![(root, 1)] })
            }
            _ => Err(Error::integration_unsupported(
                "denominator is not a product of factors linear in lambda",
            )),
        }
    }

    fn pow(&self, k: i64, cfg: &ZeroTestConfig) -> Result<RatL> {
        let base = if k >= 0 { self.clone() } else { self.invert(cfg)? };
        let mut acc = RatL::constant(&Expr::one());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base, cfg)?;
        }
        Ok(acc)
    }

    fn from_expr(e: &Expr, cfg: &ZeroTestConfig) -> Result<RatL> {
        if !contains_lambda(e) {
            return Ok(RatL::constant(e));
        }
        match e {
            Expr::Sym(Symbol::Lambda) => {
                Ok(RatL { num: vec![Expr::zero(), Expr::one()], den: vec![] })
            }
            Expr::Sum(ts) => {
                let mut acc = RatL::constant(&Expr::zero());
                for t in ts {
                    acc = acc.add(&RatL::from_expr(t, cfg)?, cfg)?;
                }
                Ok(acc)
            }
            Expr::Prod(fs) => {
                let mut acc = RatL::constant(&Expr::one());
                for f in fs {
                    acc = acc.mul(&RatL::from_expr(f, cfg)?, cfg)?;
                }
                Ok(acc)
            }
            Expr::Pow(b, k) => RatL::from_expr(b, cfg)?.pow(*k, cfg),
            Expr::Root(_, _) | Expr::Ln(_) => Err(Error::integration_unsupported(
                "lambda inside a logarithm or fractional power",
            )),
            // Remaining node kinds never contain λ.
            _ => Ok(RatL::constant(e)),
        }
    }

    /// Cancels denominator factors that divide the numerator and trims the
    /// numerator to its true degree.
    fn cancelled(&self, cfg: &ZeroTestConfig) -> Result<RatL> {
        let mut num = poly_trim(&self.num, cfg)?;
        let mut den = Vec::new();
        for (b, k) in &self.den {
            let mut k = *k;
            while k > 0 {
                let (q, r) = poly_divide_linear(&num, b);
                if q.is_empty() || !is_zero(&r, cfg)? {
                    break;
                }
                num = poly_trim(&q, cfg)?;
                k -= 1;
            }
            if k > 0 {
                den.push((b.clone(), k));
            }
        }
        Ok(RatL { num, den })
    }

    /// `∫₀¹ (λ + b)^s dλ` for integer `s`.
    fn primitive_power(b: &Expr, s: i64) -> Expr {
        if s == -1 {
            // Single logarithm of the endpoint ratio.
            Expr::ln((Expr::one() + b.clone()) / b.clone())
        } else {
            (Expr::pow(Expr::one() + b.clone(), s + 1) - Expr::pow(b.clone(), s + 1))
                / Expr::int(s + 1)
        }
    }

    fn integrate_01(&self, cfg: &ZeroTestConfig) -> Result<Expr> {
        // Endpoint singularities: a surviving factor vanishing at λ=0 or λ=1.
        for (b, _) in &self.den {
            if is_zero(b, cfg)? || is_zero(&(Expr::one() + b.clone()), cfg)? {
                return Err(Error::singular_integrand(
                    "denominator factor vanishes at an endpoint of the unit interval",
                ));
            }
        }
        match self.den.len() {
            0 => {
                // Plain polynomial: power rule at the endpoints.
                let mut acc = Expr::zero();
                for (i, c) in self.num.iter().enumerate() {
                    acc = acc + c.clone() * Expr::rat(1, (i + 1) as i64);
                }
                Ok(acc)
            }
            1 => {
                // Expand the numerator around λ = −b and integrate termwise.
                let (b, k) = (&self.den[0].0, self.den[0].1);
                let mut rest = self.num.clone();
                let mut acc = Expr::zero();
                let mut t: i64 = 0;
                while !rest.is_empty() {
                    let (q, r) = poly_divide_linear(&rest, b);
                    acc = acc + r * Self::primitive_power(b, t - i64::from(k));
                    rest = q;
                    t += 1;
                }
                Ok(acc)
            }
            _ => {
                // Peel the leading contribution of one factor by cover-up,
                // reduce, and recurse; the total multiplicity strictly drops.
                let (b1, k1) = self.den.last().expect("nonempty").clone();
                let minus_b1 = -b1.clone();
                let mut rest_poly = vec![Expr::one()];
                let mut rest_at = Expr::one();
                for (b, k) in &self.den[..self.den.len() - 1] {
                    for _ in 0..*k {
                        rest_poly = poly_mul(&rest_poly, &[b.clone(), Expr::one()]);
                    }
                    rest_at = rest_at * Expr::pow(b.clone() - b1.clone(), *k as i64);
                }
                let c = poly_eval(&self.num, &minus_b1) / rest_at;
                let mut acc = c.clone() * Self::primitive_power(&b1, -i64::from(k1));
                // (N − c·R) is divisible by (λ + b1); the remainder is zero
                // by construction and dropped.
                let diff = poly_add(&self.num, &poly_scale(&rest_poly, &-c));
                let (q, _) = poly_divide_linear(&diff, &b1);
                let mut den = self.den.clone();
                let last = den.len() - 1;
                if den[last].1 > 1 {
                    den[last].1 -= 1;
                } else {
                    den.pop();
                }
                let reduced = RatL { num: q, den }.cancelled(cfg)?;
                acc = acc + reduced.integrate_01(cfg)?;
                Ok(acc)
            }
        }
    }
}

/// `∫₀¹ e dλ` for an integrand rational in the symbol λ.
///
/// Errors: [`Error::IntegrationUnsupported`] when the λ-dependence is not of
/// the supported rational class, [`Error::SingularIntegrand`] when a
/// denominator factor vanishes at an endpoint of the unit interval (choosing
/// a different base point for the underlying homotopy usually repairs this).
pub fn integrate_lambda_01(e: &Expr, cfg: &ZeroTestConfig) -> Result<Expr> {
    let r = RatL::from_expr(e, cfg)?.cancelled(cfg)?;
    r.integrate_01(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{exprs_equal, parse};

    fn e(src: &str) -> Expr {
        parse(src).unwrap()
    }

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    #[test]
    fn polynomial_integrand() {
        // ∫₀¹ (3λ² + 2αλ + u00) = 1 + α + u00.
        let out = integrate_lambda_01(&e("3*lambda^2 + 2*alpha*lambda + u[0,0]"), &cfg()).unwrap();
        assert!(exprs_equal(&out, &e("1 + alpha + u[0,0]"), &cfg()).unwrap());
    }

    #[test]
    fn simple_log_integral() {
        // ∫₀¹ dλ/(λ u10 + u01) = ln((u10+u01)/u01)/u10.
        let out = integrate_lambda_01(&e("1/(lambda*u[1,0] + u[0,1])"), &cfg()).unwrap();
        let want = e("ln((u[1,0]+u[0,1])/u[0,1])/u[1,0]");
        assert!(exprs_equal(&out, &want, &cfg()).unwrap(), "got {out}");
    }

    #[test]
    fn double_pole_is_rational() {
        // ∫₀¹ dλ/(λ+b)² = 1/b − 1/(1+b) = 1/(b(1+b)).
        let out = integrate_lambda_01(&e("(lambda + alpha)^(-2)"), &cfg()).unwrap();
        let want = e("1/(alpha*(1+alpha))");
        assert!(exprs_equal(&out, &want, &cfg()).unwrap(), "got {out}");
    }

    #[test]
    fn distinct_factors_partial_fractions() {
        // 1/((λ+1)(λ+2)) integrates to ln 2 − ln(3/2) = ln(4/3).
        let out = integrate_lambda_01(&e("1/((lambda+1)*(lambda+2))"), &cfg()).unwrap();
        let want = e("ln(2) - ln(3/2)");
        assert!(exprs_equal(&out, &want, &cfg()).unwrap(), "got {out}");
    }

    #[test]
    fn cancellation_removes_apparent_pole() {
        // λ·(β)/λ — the λ in the denominator cancels; no singularity.
        let out = integrate_lambda_01(&e("(lambda*beta)/lambda"), &cfg()).unwrap();
        assert!(exprs_equal(&out, &e("beta"), &cfg()).unwrap());
    }

    #[test]
    fn pole_at_zero_is_singular() {
        let got = integrate_lambda_01(&e("beta/lambda"), &cfg());
        assert!(matches!(got, Err(Error::SingularIntegrand { .. })), "got {got:?}");
    }

    #[test]
    fn improper_fraction_mixes_poly_and_log() {
        // λ/(λ+b) = 1 − b/(λ+b) → 1 − b·ln((1+b)/b).
        let out = integrate_lambda_01(&e("lambda/(lambda+beta)"), &cfg()).unwrap();
        let want = e("1 - beta*ln((1+beta)/beta)");
        assert!(exprs_equal(&out, &want, &cfg()).unwrap(), "got {out}");
    }

    #[test]
    fn nonlinear_denominator_is_unsupported() {
        let got = integrate_lambda_01(&e("1/(lambda^2 + alpha)"), &cfg());
        assert!(matches!(got, Err(Error::IntegrationUnsupported { .. })), "got {got:?}");
    }

    #[test]
    fn lambda_under_log_is_unsupported() {
        let got = integrate_lambda_01(&e("ln(lambda + 1)"), &cfg());
        assert!(matches!(got, Err(Error::IntegrationUnsupported { .. })), "got {got:?}");
    }

    #[test]
    fn worked_homotopy_integrand() {
        // The logarithmic-density model case: ∫₀¹ c(u)·(λ a + d)⁻¹ with
        // expression coefficients; checked against an independent form.
        let integrand = e("((u[0,0]-u[0,1])*(u[1,1]-u[1,0])) / (lambda*(u[0,0]-u[0,1])*(u[1,0]-u[1,1]) + alpha - beta)");
        let out = integrate_lambda_01(&integrand, &cfg()).unwrap();
        // Antiderivative: (1/a)·ln((a+d)/d) with a = (u00−u01)(u10−u11)·(−1)… times c.
        let want = e("-ln(((u[0,1]-u[0,0])*(u[1,1]-u[1,0]) + alpha - beta)/(alpha-beta))");
        assert!(exprs_equal(&out, &want, &cfg()).unwrap(), "got {out}");
    }
}
