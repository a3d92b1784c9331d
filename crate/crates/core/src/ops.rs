//! Difference-operator zoo: discrete divergence, Euler operators (full,
//! Δ-restricted, ω-restricted), Gâteaux derivative and its formal adjoint.
//!
//! All index ranges are discovered by scanning the expression tree; nothing is
//! assumed about the stencil.

use alloc::vec::Vec;

use crate::expr::{differentiate, shift, Expr, Family, LatticeVar};

/// Discrete divergence `(S_m − I)F + (S_n − I)G`.
pub fn divergence(f: &Expr, g: &Expr) -> Expr {
    shift(f, 1, 0) - f.clone() + shift(g, 0, 1) - g.clone()
}

/// Full difference Euler operator
/// `E(P) = Σ_{(i,j)} S_m^{−i} S_n^{−j} (∂P/∂u_{ij})`,
/// summed over every `U`-family point occurring in `P`.
pub fn euler(p: &Expr) -> Expr {
    euler_over(p, Family::U)
}

/// Euler operator with respect to the Δ family:
/// `E_Δ(C) = Σ_{(i,j)} S_m^{−i} S_n^{−j} ∂C/∂(S_m^i S_n^j Δ)`.
/// `U`-family points are untouched arguments.
pub fn euler_delta(c: &Expr) -> Expr {
    euler_over(c, Family::Delta)
}

fn euler_over(p: &Expr, family: Family) -> Expr {
    let vars: Vec<LatticeVar> =
        p.lattice_vars().into_iter().filter(|v| v.family == family).collect();
    let mut acc = Expr::zero();
    for v in vars {
        let d = differentiate(p, v);
        if !d.is_zero_expr() {
            acc = acc + shift(&d, -v.dm, -v.dn);
        }
    }
    acc
}

/// Restricted Euler operator with respect to ω-slots:
/// `E_ω(S_mF) = Σ_{j=0..r} S_n^{−j} ∂(S_mF)/∂ω_{0j}`.
///
/// ω-slot occurrences are tagged as Δ-family placeholders at offsets `(0, j)`;
/// the caller guarantees slots lie in `0 ..= r`.
pub fn euler_omega(smf: &Expr, r: i64) -> Expr {
    let mut acc = Expr::zero();
    for j in 0..=r {
        let d = differentiate(smf, LatticeVar::delta(0, j));
        if !d.is_zero_expr() {
            acc = acc + shift(&d, 0, -j);
        }
    }
    acc
}

/// Gâteaux derivative of `P` in the direction `Q`:
/// `D_P(Q) = Σ_{(i,j)} (∂P/∂u_{ij}) · S_m^i S_n^j Q`.
pub fn gateaux(p: &Expr, q: &Expr) -> Expr {
    let vars: Vec<LatticeVar> =
        p.lattice_vars().into_iter().filter(|v| v.family == Family::U).collect();
    let mut acc = Expr::zero();
    for v in vars {
        let d = differentiate(p, v);
        if !d.is_zero_expr() {
            acc = acc + d * shift(q, v.dm, v.dn);
        }
    }
    acc
}

/// Formal adjoint of the Gâteaux derivative applied to `Q`:
/// `D*_P(Q) = Σ_{(i,j)} S_m^{−i} S_n^{−j} ((∂P/∂u_{ij}) · Q)`.
///
/// Satisfies `adjoint_apply(P, 1) = euler(P)` and the Leibniz identity
/// `euler(P·Q) = adjoint_apply(P, Q) + adjoint_apply(Q, P)`.
pub fn adjoint_apply(p: &Expr, q: &Expr) -> Expr {
    let vars: Vec<LatticeVar> =
        p.lattice_vars().into_iter().filter(|v| v.family == Family::U).collect();
    let mut acc = Expr::zero();
    for v in vars {
        let d = differentiate(p, v);
        if !d.is_zero_expr() {
            acc = acc + shift(&(d * q.clone()), -v.dm, -v.dn);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero, parse, ZeroTestConfig};

    fn e(src: &str) -> Expr {
        parse(src).unwrap()
    }

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    #[test]
    fn euler_of_translation_lagrangian() {
        // L = (u10 − u00)(u01 − u00): the discrete wave Lagrangian.
        let l = e("(u[1,0]-u[0,0])*(u[0,1]-u[0,0])");
        let want = e("2*u[0,0]-u[0,1]-u[1,0]+u[-1,1]-u[-1,0]+u[1,-1]-u[0,-1]");
        assert!(is_zero(&(euler(&l) - want), &cfg()).unwrap());
    }

    #[test]
    fn euler_annihilates_divergences() {
        for (f, g) in [
            (e("u[0,0]*u[1,0]"), e("u[0,-1]^2 - u[1,1]")),
            (e("parity(1,0,0)*u[0,0]*u[2,1]"), e("m*u[-1,0] + ln(u[0,0]^2)")),
            (e("1/(u[1,0]-u[0,1])"), e("u[0,0]*u[1,0]*u[0,1]")),
        ] {
            let d = divergence(&f, &g);
            assert!(is_zero(&euler(&d), &cfg()).unwrap(), "euler(div) != 0 for F={f}, G={g}");
        }
    }

    #[test]
    fn adjoint_at_one_is_euler() {
        let p = e("u[0,0]^2*u[1,1] - m*u[0,-1] + 1/(u[2,0]+u[0,0])");
        let lhs = adjoint_apply(&p, &Expr::one());
        assert!(is_zero(&(lhs - euler(&p)), &cfg()).unwrap());
    }

    #[test]
    fn leibniz_rule_for_euler() {
        let p = e("u[0,0]*u[1,0] - u[0,1]");
        let q = e("u[0,0] + u[1,1]^2");
        let lhs = euler(&(p.clone() * q.clone()));
        let rhs = adjoint_apply(&p, &q) + adjoint_apply(&q, &p);
        assert!(is_zero(&(lhs - rhs), &cfg()).unwrap());
    }

    #[test]
    fn euler_delta_ignores_u_points() {
        // C = D00² u10 + D[1,2]·u00.
        let c = e("D[0,0]^2*u[1,0] + D[1,2]*u[0,0]");
        let want = e("2*D[0,0]*u[1,0] + u[-1,-2]");
        assert!(is_zero(&(euler_delta(&c) - want), &cfg()).unwrap());
    }

    #[test]
    fn euler_omega_annihilates_pure_column_shifts() {
        // H over slots; (S_n − I)H must be in the kernel of the restricted
        // Euler operator.
        let h = e("D[0,0]^2*u[1,0] + D[0,1]");
        let shifted = shift(&h, 0, 1) - h;
        let got = euler_omega(&shifted, 2);
        assert!(is_zero(&got, &cfg()).unwrap(), "got {got}");
    }

    #[test]
    fn gateaux_of_linear_is_value() {
        // For P linear in u with constant coefficients, D_P(Q) is P with u ↦ Q.
        let p = e("u[1,0] - 2*u[0,0]");
        let q = e("u[0,0]^2");
        let want = e("u[1,0]^2 - 2*u[0,0]^2");
        assert!(is_zero(&(gateaux(&p, &q) - want), &cfg()).unwrap());
    }
}
