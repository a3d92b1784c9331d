//! Unimodular lattice transforms: relabelling expressions between charts,
//! transporting conservation-law densities, and converting quad-graph
//! equations to Kovalevskaya form.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::zero::ZeroTestConfig;
use crate::expr::{shift, substitute, Expr, LatticeVar, Symbol};

use super::{KovalevskayaPde, LatticeTransform, QuadGraphPde, ShearKind};

/// Which way a density pair moves between the two charts of a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Original chart → transformed chart.
    Forward,
    /// Transformed chart → original chart.
    Back,
}

/// How a transform acts on the pieces of an expression: lattice offsets,
/// the explicit coordinates, and linear exponents.
struct Relabelling {
    /// Offset map induced by the matrix `A`.
    idx: fn(i64, i64, i64) -> (i64, i64),
    shear: i64,
    /// Replacements for the coordinate symbols `m`, `n` in the new chart.
    m_sub: Expr,
    n_sub: Expr,
    /// Action on a linear exponent `a·m + b·n + c`.
    exponent: fn(i64, i64, i64, i64, [i64; 2]) -> (i64, i64, i64),
    b: [i64; 2],
}

impl Relabelling {
    fn of(t: &LatticeTransform) -> Result<Relabelling> {
        let kind = t.classify()?;
        let [b1, b2] = t.b;
        Ok(match kind {
            ShearKind::M(k) => Relabelling {
                idx: |i, j, k| (i + k * j, j),
                shear: k,
                // m = m̃ − k·ñ − b1 + k·b2, n = ñ − b2.
                m_sub: Expr::m() - Expr::int(k) * Expr::n() + Expr::int(k * b2 - b1),
                n_sub: Expr::n() - Expr::int(b2),
                exponent: |a, b, c, k, [b1, b2]| {
                    (a, b - k * a, c - a * b1 + a * k * b2 - b * b2)
                },
                b: t.b,
            },
            ShearKind::N(k) => Relabelling {
                idx: |i, j, k| (i, j + k * i),
                shear: k,
                // m = m̃ − b1, n = ñ − k·m̃ − b2 + k·b1.
                m_sub: Expr::m() - Expr::int(b1),
                n_sub: Expr::n() - Expr::int(k) * Expr::m() + Expr::int(k * b1 - b2),
                exponent: |a, b, c, k, [b1, b2]| {
                    (a - k * b, b, c - a * b1 + b * k * b1 - b * b2)
                },
                b: t.b,
            },
        })
    }

    fn apply(&self, e: &Expr) -> Expr {
        match e {
            Expr::Num(_) => e.clone(),
            Expr::Sym(Symbol::M) => self.m_sub.clone(),
            Expr::Sym(Symbol::N) => self.n_sub.clone(),
            Expr::Sym(_) => e.clone(),
            Expr::Var(v) => {
                let (dm, dn) = (self.idx)(v.dm, v.dn, self.shear);
                Expr::var(LatticeVar { family: v.family, dm, dn })
            }
            Expr::Parity(a, b, c) => {
                let (a2, b2, c2) = (self.exponent)(
                    i64::from(*a),
                    i64::from(*b),
                    i64::from(*c),
                    self.shear,
                    self.b,
                );
                Expr::parity(a2, b2, c2)
            }
            Expr::PowLin(p) => {
                let (a2, b2, c2) = (self.exponent)(p.a, p.b, p.c, self.shear, self.b);
                Expr::pow_lin(p.base.clone(), a2, b2, c2)
            }
            Expr::Sum(ts) => Expr::add(ts.iter().map(|t| self.apply(t)).collect()),
            Expr::Prod(fs) => Expr::mul(fs.iter().map(|f| self.apply(f)).collect()),
            Expr::Pow(b, k) => Expr::pow(self.apply(b), *k),
            Expr::Root(b, q) => Expr::root_pow(self.apply(b), q.clone()),
            Expr::Ln(b) => Expr::ln(self.apply(b)),
        }
    }
}

/// Rewrites an expression in the coordinates of the transformed chart:
/// `u[i,j]` moves to the image offset and explicit `m`, `n` are replaced by
/// their values in the new coordinates.
pub fn relabel(e: &Expr, t: &LatticeTransform) -> Result<Expr> {
    Ok(Relabelling::of(t)?.apply(e))
}

/// Telescoping factor `(S^k − I)/(S − I)` applied along one axis:
/// `Σ_{s=0}^{k−1} S^s x` for `k ≥ 0`, `−Σ_{s=k}^{−1} S^s x` for `k < 0`.
pub(crate) fn geometric(x: &Expr, k: i64, axis_m: bool) -> Expr {
    let mut terms = Vec::new();
    let (lo, hi, sign) = if k >= 0 { (0, k, 1) } else { (k, 0, -1) };
    for s in lo..hi {
        let sh = if axis_m { shift(x, s, 0) } else { shift(x, 0, s) };
        terms.push(if sign > 0 { sh } else { -sh });
    }
    Expr::add(terms)
}

/// Moves a density pair across a lattice transform, preserving divergences:
/// if `(S_m−I)F + (S_n−I)G = c` in one chart then the transported pair has
/// the relabelled `c` as its divergence in the other chart.
pub fn transport_densities(
    f: &Expr,
    g: &Expr,
    t: &LatticeTransform,
    dir: Direction,
) -> Result<(Expr, Expr)> {
    let kind = t.classify()?;
    match (dir, kind) {
        (Direction::Forward, ShearKind::M(k)) => {
            let ft = relabel(f, t)?;
            let gt = relabel(g, t)?;
            Ok((ft + geometric(&gt, k, true), shift(&gt, k, 0)))
        }
        (Direction::Forward, ShearKind::N(k)) => {
            let ft = relabel(f, t)?;
            let gt = relabel(g, t)?;
            Ok((shift(&ft, 0, k), gt + geometric(&ft, k, false)))
        }
        (Direction::Back, ShearKind::M(k)) => {
            let inv = t.inverse()?;
            let gt = shift(g, -k, 0);
            let ft = f.clone() - geometric(&gt, k, true);
            Ok((relabel(&ft, &inv)?, relabel(&gt, &inv)?))
        }
        (Direction::Back, ShearKind::N(k)) => {
            let inv = t.inverse()?;
            let ft = shift(f, 0, -k);
            let gt = g.clone() - geometric(&ft, k, false);
            Ok((relabel(&ft, &inv)?, relabel(&gt, &inv)?))
        }
    }
}

/// Converts a quad-graph equation to Kovalevskaya form under the given
/// transform: the solved corner `u[1,1] = C` becomes `u[K,sigma] = omega` in
/// the new chart. Fails with [`Error::NotKovalevskaya`] when the relabelled
/// right-hand side is not confined to the rows below the solved point.
pub fn to_kovalevskaya(
    eq: &QuadGraphPde,
    t: &LatticeTransform,
    cfg: &ZeroTestConfig,
) -> Result<KovalevskayaPde> {
    let rl = Relabelling::of(t)?;
    let omega = rl.apply(eq.corner(1, 1));
    let (k, sigma) = (rl.idx)(1, 1, rl.shear);
    if k < 1 {
        return Err(Error::not_kovalevskaya(
            "transform does not move the solved corner to a positive row",
        ));
    }
    let solve00 = {
        let raw = rl.apply(eq.corner(0, 0));
        let solved = LatticeVar::u(k, sigma);
        let candidate = substitute(&raw, solved, &Expr::sym(Symbol::from_name("w")));
        // Usable for slot rewriting only when its points avoid row 0.
        if candidate.lattice_vars().iter().all(|v| v.dm >= 1) {
            Some(candidate)
        } else {
            None
        }
    };
    KovalevskayaPde::new(k, sigma, omega, solve00, eq.params().to_vec(), cfg)
}
