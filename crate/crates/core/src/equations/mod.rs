//! Difference-equation objects and the operations that move expressions
//! between lattice charts: pullback onto initial data, forward evolution,
//! Kovalevskaya conversion, and density transport under unimodular
//! coordinate changes.

pub(crate) mod pullback;
pub(crate) mod transform;

pub use pullback::{
    cross_pullback, cross_pullback_with_delta, evolve_kovalevskaya, evolve_quad,
    kovalevskaya_pullback, kovalevskaya_pullback_with_delta, pullback, pullback_with_delta,
};
pub use transform::{relabel, to_kovalevskaya, transport_densities, Direction};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::zero::{depends_on, is_zero, PointSampler, ZeroTestConfig};
use crate::expr::{evaluate, substitute, Expr, Family, LatticeVar, Symbol};

/// A quad-graph equation: one relation among the four corners of a lattice
/// square, solvable for each corner. Each entry gives that corner's value in
/// terms of the other three corners (plus `m`, `n` and parameters).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadGraphPde {
    corners: BTreeMap<(i64, i64), Expr>,
    params: Vec<Symbol>,
}

/// An equation in Kovalevskaya form: the single point `u[K, sigma]` equals
/// `omega`, an expression over rows `0 ..= K−1` (a "row" is the m-offset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KovalevskayaPde {
    /// Order: the solved point sits on row `K`.
    pub k: i64,
    /// n-offset of the solved point (`u[K, sigma] = omega`).
    pub sigma: i64,
    /// Right-hand side over rows `0 ..= K−1`.
    pub omega: Expr,
    /// Leftmost row-0 column on which `omega` depends.
    pub l: i64,
    /// Optional inverse: the value of `u[0, L]` in terms of the symbol `w`
    /// (standing for omega's value) and the remaining points. Used to rewrite
    /// initial-data expressions in terms of ω-slots.
    pub solve00: Option<Expr>,
    params: Vec<Symbol>,
}

/// Either kind of partial difference equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equation {
    Quad(QuadGraphPde),
    Kovalevskaya(KovalevskayaPde),
}

/// Which lattice points constitute initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialDataSpec {
    /// Rows `0 ..= K−1`, all columns (Kovalevskaya initial strip).
    KovalevskayaRows(i64),
    /// The staircase cross: `{(i,0): i ≥ 0} ∪ {(0,j): j ∈ Z} ∪ {(i,1): i ≤ 0}`.
    /// A determining set for quad-graph equations that keeps the far
    /// back-shifted row-1 points as free coordinates.
    Cross,
}

impl InitialDataSpec {
    /// Is this `U`-family point part of the initial data?
    pub fn contains(&self, v: LatticeVar) -> bool {
        if v.family != Family::U {
            return false;
        }
        match self {
            InitialDataSpec::KovalevskayaRows(k) => 0 <= v.dm && v.dm < *k,
            InitialDataSpec::Cross => {
                (v.dn == 0 && v.dm >= 0) || v.dm == 0 || (v.dn == 1 && v.dm <= 0)
            }
        }
    }

    /// `U`-family points of `e` outside this data set.
    pub fn off_data(&self, e: &Expr) -> Vec<LatticeVar> {
        e.lattice_vars()
            .into_iter()
            .filter(|v| v.family == Family::U && !self.contains(*v))
            .collect()
    }
}

impl QuadGraphPde {
    /// Builds a quad-graph equation from its four corner solutions, keyed by
    /// corner offset. Checks that each entry only uses the other three
    /// corners, and that the four solutions are mutually consistent at random
    /// sample points.
    pub fn new(
        corners: BTreeMap<(i64, i64), Expr>,
        params: Vec<Symbol>,
        cfg: &ZeroTestConfig,
    ) -> Result<Self> {
        const CORNERS: [(i64, i64); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
        for c in CORNERS {
            let e = corners.get(&c).ok_or_else(|| {
                Error::invalid(alloc::format!("missing corner solution for u[{},{}]", c.0, c.1))
            })?;
            for v in e.lattice_vars() {
                let ok = v.family == Family::U
                    && CORNERS.contains(&(v.dm, v.dn))
                    && (v.dm, v.dn) != c;
                if !ok {
                    return Err(Error::invalid(alloc::format!(
                        "corner solution for u[{},{}] may only use the other three corners, found {:?}",
                        c.0, c.1, v
                    )));
                }
            }
        }
        let eq = QuadGraphPde { corners, params };
        eq.validate(cfg)?;
        Ok(eq)
    }

    /// The solved expression for the given corner.
    pub fn corner(&self, dm: i64, dn: i64) -> &Expr {
        self.corners
            .get(&(dm, dn))
            .expect("corner solutions are validated at construction")
    }

    /// Declared parameter symbols.
    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    /// The defining residual `Δ = u[1,1] − corner(1,1)` as an expression over
    /// the four free corner variables.
    pub fn delta(&self) -> Expr {
        Expr::u(1, 1) - self.corner(1, 1).clone()
    }

    /// Numeric mutual-consistency check: evaluating any corner solution on
    /// values produced by another must return the original value.
    fn validate(&self, cfg: &ZeroTestConfig) -> Result<()> {
        let mut sampler = PointSampler::new(cfg);
        let c11 = self.corner(1, 1).clone();
        let mut accepted = 0u32;
        let mut budget = cfg.samples + cfg.max_resamples;
        'outer: while accepted < cfg.samples.min(6) {
            if budget == 0 {
                return Err(Error::SamplingExhausted { attempts: cfg.samples + cfg.max_resamples });
            }
            budget -= 1;
            // Free coordinates: three corners; u11 determined by c11.
            let mut pt = sampler.draw(&c11.symbols(), &c11.lattice_vars());
            for p in &self.params {
                pt.syms.entry(p.clone()).or_insert_with(|| sampler.rational());
            }
            for v in [LatticeVar::u(0, 0), LatticeVar::u(1, 0), LatticeVar::u(0, 1)] {
                pt.vars.entry(v).or_insert_with(|| sampler.rational());
            }
            let u11 = match evaluate(&c11, &pt) {
                Ok(v) => match v.as_exact() {
                    Some(r) => r,
                    None => return Err(Error::invalid("corner solutions must be rational")),
                },
                Err(Error::Domain { .. }) => continue 'outer,
                Err(e) => return Err(e),
            };
            pt.vars.insert(LatticeVar::u(1, 1), u11);
            // Every other corner solution must reproduce the stored value.
            for (&(i, j), expr) in &self.corners {
                if (i, j) == (1, 1) {
                    continue;
                }
                let expected = pt.vars[&LatticeVar::u(i, j)].clone();
                match evaluate(expr, &pt) {
                    Ok(v) => {
                        let got = v
                            .as_exact()
                            .ok_or_else(|| Error::invalid("corner solutions must be rational"))?;
                        if got != expected {
                            return Err(Error::invalid(alloc::format!(
                                "corner solutions are mutually inconsistent at u[{i},{j}]"
                            )));
                        }
                    }
                    Err(Error::Domain { .. }) => continue 'outer,
                    Err(e) => return Err(e),
                }
            }
            accepted += 1;
        }
        Ok(())
    }
}

impl KovalevskayaPde {
    /// Builds and validates a Kovalevskaya-form equation; `sigma` is the
    /// n-offset of the solved point, `solve00` the optional `u[0,L]`-inverse.
    pub fn new(
        k: i64,
        sigma: i64,
        omega: Expr,
        solve00: Option<Expr>,
        params: Vec<Symbol>,
        cfg: &ZeroTestConfig,
    ) -> Result<Self> {
        if k < 1 {
            return Err(Error::not_kovalevskaya("order must be at least 1"));
        }
        let mut l: Option<i64> = None;
        for v in omega.lattice_vars() {
            if v.family != Family::U {
                return Err(Error::not_kovalevskaya("omega must use only u-points"));
            }
            if v.dm < 0 || v.dm >= k {
                return Err(Error::not_kovalevskaya(alloc::format!(
                    "omega depends on u[{},{}] outside rows 0..{}",
                    v.dm,
                    v.dn,
                    k - 1
                )));
            }
            if v.dm == 0 {
                l = Some(l.map_or(v.dn, |cur: i64| cur.min(v.dn)));
            }
        }
        let l = l.ok_or_else(|| {
            Error::not_kovalevskaya("omega must depend on at least one row-0 point")
        })?;
        let eq = KovalevskayaPde { k, sigma, omega, l, solve00, params };
        if !depends_on(&eq.omega, LatticeVar::u(0, l), cfg)? {
            return Err(Error::not_kovalevskaya(
                "omega's leftmost row-0 dependence is degenerate",
            ));
        }
        if let Some(inv) = &eq.solve00 {
            eq.validate_solve00(inv, cfg)?;
        }
        Ok(eq)
    }

    /// Declared parameter symbols.
    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    /// The initial-data strip for this equation.
    pub fn data(&self) -> InitialDataSpec {
        InitialDataSpec::KovalevskayaRows(self.k)
    }

    /// The defining residual `Δ = u[K,sigma] − omega` over free variables.
    pub fn delta(&self) -> Expr {
        Expr::u(self.k, self.sigma) - self.omega.clone()
    }

    /// Checks `solve00` really inverts omega: substituting `w ↦ omega` into it
    /// must reproduce `u[0,L]` identically.
    fn validate_solve00(&self, inv: &Expr, cfg: &ZeroTestConfig) -> Result<()> {
        let w = Symbol::from_name("w");
        if !inv.symbols().contains(&w) {
            return Err(Error::invalid("solve00 must use the placeholder symbol w"));
        }
        let roundtrip =
            crate::expr::substitute_sym(inv, &w, &self.omega) - Expr::u(0, self.l);
        if !is_zero(&roundtrip, cfg)? {
            return Err(Error::invalid("solve00 does not invert omega at u[0,L]"));
        }
        Ok(())
    }
}

impl Equation {
    /// Parameters declared by the underlying equation.
    pub fn params(&self) -> &[Symbol] {
        match self {
            Equation::Quad(q) => q.params(),
            Equation::Kovalevskaya(k) => k.params(),
        }
    }

    /// The natural initial-data set for this equation.
    pub fn default_data(&self) -> InitialDataSpec {
        match self {
            Equation::Quad(_) => InitialDataSpec::Cross,
            Equation::Kovalevskaya(k) => k.data(),
        }
    }

    /// The defining expression that vanishes on solutions (solved point
    /// minus its right-hand side).
    pub fn delta(&self) -> Expr {
        match self {
            Equation::Quad(q) => q.delta(),
            Equation::Kovalevskaya(k) => k.delta(),
        }
    }
}

/// A unimodular affine lattice transform `(m̃,ñ)ᵀ = A·(m,n)ᵀ + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeTransform {
    /// Row-major 2×2 integer matrix with determinant ±1.
    pub a: [[i64; 2]; 2],
    /// Integer translation.
    pub b: [i64; 2],
}

/// The generator family `transport_densities` implements directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ShearKind {
    /// `A = (1 k; 0 1)`: m̃ = m + k·n.
    M(i64),
    /// `A = (1 0; k 1)`: ñ = n + k·m.
    N(i64),
}

impl LatticeTransform {
    pub fn identity() -> Self {
        LatticeTransform { a: [[1, 0], [0, 1]], b: [0, 0] }
    }

    /// The shear `m̃ = m + k·n` (the quad-graph → Kovalevskaya map for k=1).
    pub fn shear_m(k: i64) -> Self {
        LatticeTransform { a: [[1, k], [0, 1]], b: [0, 0] }
    }

    /// The transposed shear `ñ = n + k·m`.
    pub fn shear_n(k: i64) -> Self {
        LatticeTransform { a: [[1, 0], [k, 1]], b: [0, 0] }
    }

    pub fn det(&self) -> i64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    /// The inverse transform (exists since |det| = 1).
    pub fn inverse(&self) -> Result<LatticeTransform> {
        let d = self.det();
        if d.abs() != 1 {
            return Err(Error::UnsupportedTransform {
                message: String::from("matrix is not unimodular"),
            });
        }
        // A⁻¹ = adj(A)/det; for det = ±1 this stays integral.
        let inv = [
            [self.a[1][1] * d, -self.a[0][1] * d],
            [-self.a[1][0] * d, self.a[0][0] * d],
        ];
        let b = [
            -(inv[0][0] * self.b[0] + inv[0][1] * self.b[1]),
            -(inv[1][0] * self.b[0] + inv[1][1] * self.b[1]),
        ];
        Ok(LatticeTransform { a: inv, b })
    }

    pub(crate) fn classify(&self) -> Result<ShearKind> {
        if self.det().abs() != 1 {
            return Err(Error::UnsupportedTransform {
                message: String::from("matrix is not unimodular"),
            });
        }
        match self.a {
            [[1, k], [0, 1]] => Ok(ShearKind::M(k)),
            [[1, 0], [k, 1]] => Ok(ShearKind::N(k)),
            _ => Err(Error::UnsupportedTransform {
                message: String::from(
                    "only shears (1 k; 0 1), their transposes, and the identity are implemented",
                ),
            }),
        }
    }
}

/// Substitutes `u[1,1] ↦ u[1,1] − D[0,0]` — rewrites a corner solution so it
/// solves the Δ-perturbed relation `u[1,1] = corner(1,1) + Δ`.
pub(crate) fn corner_with_delta(corner_expr: &Expr) -> Expr {
    substitute(
        corner_expr,
        LatticeVar::u(1, 1),
        &(Expr::u(1, 1) - Expr::delta(0, 0)),
    )
}
