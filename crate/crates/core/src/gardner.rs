//! The Gardner hierarchy of conservation laws for the lattice potential KdV
//! equation on the quad-graph.
//!
//! Two generating functions in a deformation parameter ε,
//!
//! ```text
//! F = −ln(u[1,0]−u[0,1]) − ln(1 + (u[1,0]−u[0,1])⁻¹ Σ_{i≥1} v⁽ⁱ⁾ εⁱ),
//! G = ln ε − ln(u[0,0]−u[2,0]) + ln(1 + (v⁽¹⁾)⁻¹ Σ_{i≥1} v⁽ⁱ⁺¹⁾ εⁱ),
//! ```
//!
//! yield one conservation law per power of ε (the `ln ε` offset of `G` is an
//! additive tag, not a series term). The `v` terms obey the quadratic
//! recursion `v⁽¹⁾ = (u[0,0]−u[2,0])⁻¹`,
//! `v⁽ⁱ⁾ = v⁽¹⁾ Σ_{j=1}^{i−1} v⁽ʲ⁾ · S_m v⁽ⁱ⁻ʲ⁾`.
//!
//! Each `v⁽ᵅ⁾` depends on `u[α+1,0]` but on no further point of the bottom
//! row ([`check_inflem`]); consequently the root of the level-α law depends
//! on the staircase point `u[−(α+1),1]` while all lower levels do not
//! ([`check_distinctness`]), which certifies that the hierarchy consists of
//! pairwise inequivalent conservation laws without taking a continuum limit.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::claw::{root, DensityPair};
use crate::equations::{Equation, QuadGraphPde};
use crate::error::{Error, Result};
use crate::expr::{
    depends_on, differentiate, is_zero, parse, shift, Expr, LatticeVar, Symbol, ZeroTestConfig,
};
use crate::series::{series_log1p, EpsSeries};

/// Desk-scale cap: expression sizes grow combinatorially with the level.
pub const ALPHA_MAX: usize = 4;

/// The lattice potential KdV equation on the quad-graph,
/// `(u[1,1]−u[0,0])(u[1,0]−u[0,1]) = β−α`, with all four corner solutions.
pub fn dpkdv_equation(cfg: &ZeroTestConfig) -> Result<Equation> {
    let e = |s: &str| parse(s).expect("built-in corner expression must parse");
    let mut corners = BTreeMap::new();
    corners.insert((1, 1), e("u[0,0] + (beta-alpha)/(u[1,0]-u[0,1])"));
    corners.insert((0, 0), e("u[1,1] + (beta-alpha)/(u[0,1]-u[1,0])"));
    corners.insert((1, 0), e("u[0,1] + (beta-alpha)/(u[1,1]-u[0,0])"));
    corners.insert((0, 1), e("u[1,0] - (beta-alpha)/(u[1,1]-u[0,0])"));
    Ok(Equation::Quad(QuadGraphPde::new(
        corners,
        vec![Symbol::Alpha, Symbol::Beta],
        cfg,
    )?))
}

fn v1() -> Expr {
    Expr::pow(Expr::u(0, 0) - Expr::u(2, 0), -1)
}

/// The first `count` terms `v⁽¹⁾ … v⁽ᶜᵒᵘⁿᵗ⁾` of the quadratic recursion.
pub fn v_terms(count: usize) -> Vec<Expr> {
    assert!(count >= 1, "at least one v term must be requested");
    let mut v = vec![v1()];
    for i in 2..=count {
        let mut sum = Expr::int(0);
        for j in 1..=i - 1 {
            sum = sum + v[j - 1].clone() * shift(&v[i - j - 1], 1, 0);
        }
        v.push(v1() * sum);
    }
    v
}

/// The single term `v⁽ⁱ⁾`, `i ≥ 1`.
pub fn v_term(i: usize) -> Expr {
    v_terms(i).pop().expect("v_terms returns i elements")
}

/// One level of the hierarchy: the ε^α coefficients of the generating
/// functions together with the `v` terms they are built from.
#[derive(Debug, Clone)]
pub struct GardnerLevel {
    /// Power of ε this level was extracted from.
    pub alpha: usize,
    /// Density transported by `S_m`.
    pub f_alpha: Expr,
    /// Density transported by `S_n`.
    pub g_alpha: Expr,
    /// The terms `v⁽¹⁾ … v⁽ᵅ⁺¹⁾` entering this level.
    pub v_terms: Vec<Expr>,
}

impl GardnerLevel {
    /// The level as a density pair.
    pub fn pair(&self) -> DensityPair {
        DensityPair::new(self.f_alpha.clone(), self.g_alpha.clone())
    }
}

/// The ε-free densities `F₀ = −ln(u[1,0]−u[0,1])`, `G₀ = −ln(u[0,0]−u[2,0])`.
pub fn gardner_level0() -> DensityPair {
    DensityPair::new(
        Expr::int(-1) * Expr::ln(Expr::u(1, 0) - Expr::u(0, 1)),
        Expr::int(-1) * Expr::ln(Expr::u(0, 0) - Expr::u(2, 0)),
    )
}

/// Extracts level `alpha` from the generating functions expanded to `order`.
pub fn gardner_densities(alpha: usize, order: usize) -> Result<GardnerLevel> {
    if alpha < 1 || alpha > order {
        return Err(Error::invalid("level must satisfy 1 <= alpha <= order"));
    }
    let v = v_terms(order + 1);
    let inv_fu = Expr::pow(Expr::u(1, 0) - Expr::u(0, 1), -1);
    let mut fa = vec![Expr::int(0)];
    let mut ga = vec![Expr::int(0)];
    for i in 1..=order {
        fa.push(inv_fu.clone() * v[i - 1].clone());
        // v⁽ⁱ⁺¹⁾ / v⁽¹⁾ with the division folded into a product.
        ga.push((Expr::u(0, 0) - Expr::u(2, 0)) * v[i].clone());
    }
    let lf = series_log1p(&EpsSeries::from_coeffs(fa))?;
    let lg = series_log1p(&EpsSeries::from_coeffs(ga))?;
    Ok(GardnerLevel {
        alpha,
        f_alpha: Expr::int(-1) * lf.coeff(alpha),
        g_alpha: lg.coeff(alpha),
        v_terms: v[..=alpha].to_vec(),
    })
}

/// Dependence pattern of one `v` term on the bottom row.
#[derive(Debug, Clone)]
pub struct InflemLevel {
    pub alpha: usize,
    /// Whether `∂v⁽ᵅ⁾/∂u[α+j,0] ≠ 0` for `j = 1..=4`; the expected pattern
    /// is `[true, false, false, false]`.
    pub derivative_nonzero: [bool; 4],
    /// Whether `∂²(v⁽ᵅ⁺¹⁾/v⁽¹⁾)/∂u[0,0]∂u[α+2,0] ≠ 0`, the witness that the
    /// top `v` term genuinely couples the two ends of its stencil.
    pub mixed_witness_nonzero: bool,
}

impl InflemLevel {
    pub fn passes(&self) -> bool {
        self.derivative_nonzero == [true, false, false, false] && self.mixed_witness_nonzero
    }
}

#[derive(Debug, Clone)]
pub struct InflemReport {
    pub levels: Vec<InflemLevel>,
    pub all_pass: bool,
}

/// Verifies, level by level, that `v⁽ᵅ⁾` depends on `u[α+1,0]` and on no
/// later bottom-row point, and that the mixed second derivative of
/// `v⁽ᵅ⁺¹⁾/v⁽¹⁾` with respect to the ends of its stencil is nonzero.
pub fn check_inflem(alpha_max: usize, cfg: &ZeroTestConfig) -> Result<InflemReport> {
    if alpha_max < 1 {
        return Err(Error::invalid("alpha_max must be at least 1"));
    }
    let v = v_terms(alpha_max + 1);
    let mut levels = Vec::new();
    for alpha in 1..=alpha_max {
        let va = &v[alpha - 1];
        let mut pattern = [false; 4];
        for (slot, j) in (1..=4).enumerate() {
            let d = differentiate(va, LatticeVar::u((alpha + j) as i64, 0));
            pattern[slot] = !is_zero(&d, cfg)?;
        }
        let ratio = (Expr::u(0, 0) - Expr::u(2, 0)) * v[alpha].clone();
        let mixed = differentiate(
            &differentiate(&ratio, LatticeVar::u((alpha + 2) as i64, 0)),
            LatticeVar::u(0, 0),
        );
        levels.push(InflemLevel {
            alpha,
            derivative_nonzero: pattern,
            mixed_witness_nonzero: !is_zero(&mixed, cfg)?,
        });
    }
    let all_pass = levels.iter().all(InflemLevel::passes);
    Ok(InflemReport { levels, all_pass })
}

/// Distinctness certificate for one level: its root depends on the staircase
/// point `u[−(α+1),1]`, which the roots of all lower levels avoid.
#[derive(Debug, Clone)]
pub struct DistinctnessLevel {
    pub alpha: usize,
    pub witness: LatticeVar,
    pub root_depends_on_witness: bool,
    pub lower_levels_independent: bool,
}

impl DistinctnessLevel {
    pub fn passes(&self) -> bool {
        self.root_depends_on_witness && self.lower_levels_independent
    }
}

#[derive(Debug, Clone)]
pub struct DistinctnessReport {
    pub levels: Vec<DistinctnessLevel>,
    pub all_distinct: bool,
}

/// Computes the roots of levels `0..=alpha_max` on the staircase data and
/// certifies pairwise distinctness through the back-shifted dependence
/// witness: level α cannot be a combination of shifts of lower levels when
/// its root involves a data point theirs do not.
pub fn check_distinctness(alpha_max: usize, cfg: &ZeroTestConfig) -> Result<DistinctnessReport> {
    if alpha_max < 1 {
        return Err(Error::invalid("alpha_max must be at least 1"));
    }
    let eq = dpkdv_equation(cfg)?;
    let mut roots = vec![root(&gardner_level0(), &eq)?.z];
    for alpha in 1..=alpha_max {
        let level = gardner_densities(alpha, alpha)?;
        roots.push(root(&level.pair(), &eq)?.z);
    }
    let mut levels = Vec::new();
    for alpha in 1..=alpha_max {
        let witness = LatticeVar::u(-(alpha as i64 + 1), 1);
        let root_depends_on_witness = depends_on(&roots[alpha], witness, cfg)?;
        let mut lower_levels_independent = true;
        for lower in &roots[..alpha] {
            if depends_on(lower, witness, cfg)? {
                lower_levels_independent = false;
            }
        }
        levels.push(DistinctnessLevel {
            alpha,
            witness,
            root_depends_on_witness,
            lower_levels_independent,
        });
    }
    let all_distinct = levels.iter().all(DistinctnessLevel::passes);
    Ok(DistinctnessReport { levels, all_distinct })
}
