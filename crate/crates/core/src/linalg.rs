//! Exact rational linear algebra: Gaussian elimination with full pivoting,
//! nullspace bases, and elimination against expression-valued right-hand
//! sides (used when the unknowns are symbolic coefficients).

use alloc::vec;
use alloc::vec::Vec;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::expr::zero::{is_zero, ZeroTestConfig};
use crate::expr::Expr;

/// A basis of the nullspace of the rational matrix `a` (rows × cols).
/// Each returned vector has its first nonzero entry normalized to 1.
pub fn nullspace(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut is_pivot_col = vec![false; cols];
    let mut r = 0;
    for c in 0..cols {
        // Partial pivoting by largest absolute value keeps entries tame.
        let mut best: Option<usize> = None;
        for i in r..rows {
            if !m[i][c].is_zero()
                && best.map_or(true, |b| m[i][c].abs() > m[b][c].abs())
            {
                best = Some(i);
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = m[r][c].clone().recip();
        for x in &mut m[r] {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivot_col_of_row.push(c);
        is_pivot_col[c] = true;
        r += 1;
        if r == rows {
            break;
        }
    }
    // One basis vector per free column.
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot_col[free] {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (row, &pc) in pivot_col_of_row.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        // Normalize the first nonzero entry to 1.
        if let Some(first) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[first].clone().recip();
            for x in &mut v {
                *x *= &inv;
            }
        }
        basis.push(v);
    }
    basis
}

/// Solves `a · x = b` over the rationals, with free variables set to zero.
/// Returns `None` when the system is inconsistent.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "matrix and right-hand side must agree");
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut rhs: Vec<BigRational> = b.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..cols {
        let mut best: Option<usize> = None;
        for i in r..rows {
            if !m[i][c].is_zero()
                && best.map_or(true, |p| m[i][c].abs() > m[p][c].abs())
            {
                best = Some(i);
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].clone().recip();
        for x in &mut m[r] {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
                let sub = &f * &rhs[r];
                rhs[i] -= sub;
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    for x in rhs.iter().skip(r) {
        if !x.is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (row, col) in pivots {
        x[col] = rhs[row].clone();
    }
    Some(x)
}

/// Solves `a · x = b` where the matrix is rational but the right-hand side
/// (and hence the solution) is expression-valued. Free variables are set to
/// zero. Returns `Ok(None)` when the system is inconsistent (a dropped row's
/// right-hand side is not identically zero).
pub fn solve_expr_rhs(
    a: &[Vec<BigRational>],
    b: &[Expr],
    cfg: &ZeroTestConfig,
) -> Result<Option<Vec<Expr>>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "matrix and right-hand side must agree");
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut rhs: Vec<Expr> = b.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..cols {
        let mut best: Option<usize> = None;
        for i in r..rows {
            if !m[i][c].is_zero()
                && best.map_or(true, |p| m[i][c].abs() > m[p][c].abs())
            {
                best = Some(i);
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].clone().recip();
        for x in &mut m[r] {
            *x *= &inv;
        }
        rhs[r] = Expr::num(inv) * rhs[r].clone();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
                rhs[i] = rhs[i].clone() - Expr::num(f) * rhs[r].clone();
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    // Rows below the rank must have vanishing right-hand sides.
    for i in r..rows {
        if !is_zero(&rhs[i], cfg)? {
            return Ok(None);
        }
    }
    let mut x = vec![Expr::zero(); cols];
    for (row, col) in pivots {
        x[col] = rhs[row].clone();
    }
    Ok(Some(x))
}
