//! Text format for expressions.
//!
//! The grammar covers rational arithmetic (`+ - * / ^`), lattice variables
//! `u[i,j]` and `D[i,j]`, the scalar symbols, the calls `parity(a,b,c)`,
//! `ln(e)`, `sqrt(e)`, and powers of a positive constant with an exponent
//! linear in `m` and `n`, written like `2^(-n)` or `2^(m+n+1)`.

use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::node::{Expr, Symbol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LPar,
    RPar,
    LBrk,
    RBrk,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LPar));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RPar));
                i += 1;
            }
            b'[' => {
                out.push((i, Tok::LBrk));
                i += 1;
            }
            b']' => {
                out.push((i, Tok::RBrk));
                i += 1;
            }
            b',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let value = text
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse { at: start, message: String::from("bad number") })?;
                out.push((start, Tok::Num(value)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(String::from(&src[start..i]))));
            }
            _ => {
                return Err(Error::Parse {
                    at: i,
                    message: String::from("unexpected character"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.at();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse { at, message: String::from(what) }),
        }
    }

    fn error<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse { at: self.at(), message: String::from(message) })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        terms.push(self.term()?);
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(Expr::neg(t));
                }
                _ => break,
            }
        }
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc * rhs;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    if rhs.is_zero_expr() {
                        return self.error("division by zero");
                    }
                    acc = acc / rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::neg(inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.bump();
        // Exponent: an optionally negated integer, or a parenthesized
        // expression that must come out as an integer or as integer-linear
        // in m and n over a positive constant base.
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                let k = self.integer_literal()?;
                self.apply_int_pow(base, -k)
            }
            Some(Tok::Num(_)) => {
                let k = self.integer_literal()?;
                self.apply_int_pow(base, k)
            }
            Some(Tok::LPar) => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RPar, "expected `)` after exponent")?;
                if let Some(k) = as_integer(&inner) {
                    return self.apply_int_pow(base, k);
                }
                match (as_positive_constant(&base), as_linear_mn(&inner)) {
                    (Some(c), Some((a, b, k))) => Ok(Expr::pow_lin(c, a, b, k)),
                    (None, Some(_)) => {
                        self.error("exponents linear in m,n need a positive constant base")
                    }
                    _ => self.error("exponent must be an integer or linear in m and n"),
                }
            }
            _ => self.error("expected exponent"),
        }
    }

    fn apply_int_pow(&self, base: Expr, k: i64) -> Result<Expr> {
        if base.is_zero_expr() && k < 0 {
            return self.error("zero base with negative exponent");
        }
        Ok(Expr::pow(base, k))
    }

    fn integer_literal(&mut self) -> Result<i64> {
        let at = self.at();
        match self.bump() {
            Some(Tok::Num(v)) => v
                .to_i64()
                .ok_or(Error::Parse { at, message: String::from("integer too large") }),
            _ => Err(Error::Parse { at, message: String::from("expected integer") }),
        }
    }

    fn signed_integer(&mut self) -> Result<i64> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            Ok(-self.integer_literal()?)
        } else {
            self.integer_literal()
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.at();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::num(BigRational::from_integer(v))),
            Some(Tok::LPar) => {
                let inner = self.expr()?;
                self.expect(Tok::RPar, "expected `)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.ident_tail(at, name),
            _ => Err(Error::Parse { at, message: String::from("expected expression") }),
        }
    }

    fn ident_tail(&mut self, at: usize, name: String) -> Result<Expr> {
        match self.peek() {
            Some(Tok::LBrk) => {
                self.bump();
                let dm = self.signed_integer()?;
                self.expect(Tok::Comma, "expected `,` between lattice offsets")?;
                let dn = self.signed_integer()?;
                self.expect(Tok::RBrk, "expected `]`")?;
                match name.as_str() {
                    "u" => Ok(Expr::u(dm, dn)),
                    "D" => Ok(Expr::delta(dm, dn)),
                    _ => Err(Error::Parse {
                        at,
                        message: String::from("only `u` and `D` take lattice offsets"),
                    }),
                }
            }
            Some(Tok::LPar) if matches!(name.as_str(), "parity" | "ln" | "sqrt") => {
                self.bump();
                match name.as_str() {
                    "parity" => {
                        let a = self.signed_integer()?;
                        self.expect(Tok::Comma, "expected `,`")?;
                        let b = self.signed_integer()?;
                        self.expect(Tok::Comma, "expected `,`")?;
                        let c = self.signed_integer()?;
                        self.expect(Tok::RPar, "expected `)`")?;
                        Ok(Expr::parity(a, b, c))
                    }
                    "ln" => {
                        let inner = self.expr()?;
                        self.expect(Tok::RPar, "expected `)`")?;
                        Ok(Expr::ln(inner))
                    }
                    _ => {
                        let inner = self.expr()?;
                        self.expect(Tok::RPar, "expected `)`")?;
                        Ok(Expr::sqrt(inner))
                    }
                }
            }
            _ => Ok(Expr::sym(Symbol::from_name(&name))),
        }
    }
}

fn as_integer(e: &Expr) -> Option<i64> {
    match e {
        Expr::Num(r) if r.is_integer() => r.to_integer().to_i64(),
        _ => None,
    }
}

fn as_positive_constant(e: &Expr) -> Option<BigRational> {
    match e {
        Expr::Num(r) if r.is_positive() => Some(r.clone()),
        _ => None,
    }
}

/// Decompose an expression as `a·m + b·n + c` with integer coefficients.
fn as_linear_mn(e: &Expr) -> Option<(i64, i64, i64)> {
    let (mut a, mut b, mut c) = (0i64, 0i64, 0i64);
    for t in e.terms() {
        match &t {
            Expr::Num(_) => c += as_integer(&t)?,
            Expr::Sym(Symbol::M) => a += 1,
            Expr::Sym(Symbol::N) => b += 1,
            Expr::Prod(fs) if fs.len() == 2 => {
                let k = as_integer(&fs[0])?;
                match &fs[1] {
                    Expr::Sym(Symbol::M) => a += k,
                    Expr::Sym(Symbol::N) => b += k,
                    _ => return None,
                }
            }
            _ => return None,
        }
    }
    Some((a, b, c))
}

/// Parse one expression; the whole input must be consumed.
pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}
