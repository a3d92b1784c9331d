use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Scalar symbols an expression may refer to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Symbol {
    /// Lattice coordinate advanced by the first shift.
    M,
    /// Lattice coordinate advanced by the second shift.
    N,
    Alpha,
    Beta,
    Eps,
    Lambda,
    /// User-declared symbol (for instance the placeholder in a solved form).
    Named(String),
}

impl Symbol {
    pub fn name(&self) -> &str {
        match self {
            Symbol::M => "m",
            Symbol::N => "n",
            Symbol::Alpha => "alpha",
            Symbol::Beta => "beta",
            Symbol::Eps => "eps",
            Symbol::Lambda => "lambda",
            Symbol::Named(s) => s,
        }
    }

    pub fn from_name(name: &str) -> Symbol {
        match name {
            "m" => Symbol::M,
            "n" => Symbol::N,
            "alpha" => Symbol::Alpha,
            "beta" => Symbol::Beta,
            "eps" => Symbol::Eps,
            "lambda" => Symbol::Lambda,
            other => Symbol::Named(String::from(other)),
        }
    }
}

/// Which family a lattice variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    /// The dependent variable `u`.
    U,
    /// Shifts of an equation residual (or restricted-Euler slots), written `D`.
    Delta,
}

/// A shifted lattice variable: `u[dm,dn]` or `D[dm,dn]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticeVar {
    pub family: Family,
    pub dm: i64,
    pub dn: i64,
}

impl LatticeVar {
    pub fn u(dm: i64, dn: i64) -> Self {
        LatticeVar { family: Family::U, dm, dn }
    }
    pub fn delta(dm: i64, dn: i64) -> Self {
        LatticeVar { family: Family::Delta, dm, dn }
    }
}

/// `base^(a·m + b·n + c)` with a positive rational base.
///
/// Shifting in `m`/`n` folds into `c`, mirroring how the alternating sign
/// behaves; the base is canonicalized to be greater than one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PowLin {
    pub base: BigRational,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// A lattice expression in canonical (light) normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    /// Exact rational constant.
    Num(BigRational),
    Sym(Symbol),
    Var(LatticeVar),
    /// `(-1)^(a·m + b·n + c)` with components reduced mod 2, not all zero
    /// unless folded away at construction.
    Parity(u8, u8, u8),
    PowLin(PowLin),
    /// At least two terms, sorted, no nested sums, like terms collected.
    Sum(Vec<Expr>),
    /// At least two factors, sorted, constant folded in front, like bases
    /// merged, no nested products.
    Prod(Vec<Expr>),
    /// Integer power with exponent not in {0, 1}.
    Pow(Box<Expr>, i64),
    /// Rational (non-integer) power; evaluation supports half-integer
    /// exponents, which is all the square-root subsystem produces.
    Root(Box<Expr>, BigRational),
    Ln(Box<Expr>),
}

pub(crate) fn big(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

pub(crate) fn rational_pow(r: &BigRational, k: i64) -> BigRational {
    assert!(i64::from(i32::MIN) < k && k < i64::from(i32::MAX), "exponent out of range");
    r.pow(k as i32)
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(BigRational::zero())
    }
    pub fn one() -> Expr {
        Expr::Num(BigRational::one())
    }
    pub fn int(k: i64) -> Expr {
        Expr::Num(big(k))
    }
    pub fn rat(p: i64, q: i64) -> Expr {
        assert!(q != 0, "zero denominator");
        Expr::Num(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }
    pub fn num(r: BigRational) -> Expr {
        Expr::Num(r)
    }
    pub fn sym(s: Symbol) -> Expr {
        Expr::Sym(s)
    }
    pub fn m() -> Expr {
        Expr::Sym(Symbol::M)
    }
    pub fn n() -> Expr {
        Expr::Sym(Symbol::N)
    }
    pub fn alpha() -> Expr {
        Expr::Sym(Symbol::Alpha)
    }
    pub fn beta() -> Expr {
        Expr::Sym(Symbol::Beta)
    }
    pub fn lambda() -> Expr {
        Expr::Sym(Symbol::Lambda)
    }
    /// `u[dm,dn]`.
    pub fn u(dm: i64, dn: i64) -> Expr {
        Expr::Var(LatticeVar::u(dm, dn))
    }
    /// `D[dm,dn]`.
    pub fn delta(dm: i64, dn: i64) -> Expr {
        Expr::Var(LatticeVar::delta(dm, dn))
    }
    pub fn var(v: LatticeVar) -> Expr {
        Expr::Var(v)
    }

    /// `(-1)^(a·m + b·n + c)`; folds to ±1 when the exponent is constant.
    pub fn parity(a: i64, b: i64, c: i64) -> Expr {
        let (a, b, c) = (a.rem_euclid(2) as u8, b.rem_euclid(2) as u8, c.rem_euclid(2) as u8);
        if a == 0 && b == 0 {
            if c == 0 {
                Expr::one()
            } else {
                Expr::int(-1)
            }
        } else {
            Expr::Parity(a, b, c)
        }
    }

    /// `base^(a·m + b·n + c)` for a positive rational base.
    pub fn pow_lin(base: BigRational, a: i64, b: i64, c: i64) -> Expr {
        assert!(base.is_positive(), "pow_lin base must be positive");
        if base.is_one() {
            return Expr::one();
        }
        // Canonical base > 1 so that 2^(-n) and (1/2)^n fuse.
        let (base, a, b, c) = if base < BigRational::one() {
            (base.recip(), -a, -b, -c)
        } else {
            (base, a, b, c)
        };
        if a == 0 && b == 0 {
            Expr::Num(rational_pow(&base, c))
        } else {
            Expr::PowLin(PowLin { base, a, b, c })
        }
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut acc: BTreeMap<Vec<Expr>, BigRational> = BTreeMap::new();
        let mut stack = terms;
        stack.reverse();
        while let Some(t) = stack.pop() {
            if let Expr::Sum(ts) = t {
                for s in ts.into_iter().rev() {
                    stack.push(s);
                }
                continue;
            }
            let (coeff, key) = split_term(t);
            let slot = acc.entry(key).or_insert_with(BigRational::zero);
            *slot += coeff;
        }
        let mut out: Vec<Expr> = Vec::new();
        for (key, coeff) in acc {
            if coeff.is_zero() {
                continue;
            }
            out.push(term_from(coeff, key));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().expect("length checked"),
            _ => Expr::Sum(out),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::mul(vec![Expr::int(-1), a])
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut coeff = BigRational::one();
        let mut pow_acc: BTreeMap<Expr, BigRational> = BTreeMap::new();
        let mut parity = (0u8, 0u8, 0u8);
        let mut powlin_acc: BTreeMap<BigRational, (i64, i64, i64)> = BTreeMap::new();
        let mut stack = factors;
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f {
                Expr::Prod(fs) => {
                    for g in fs.into_iter().rev() {
                        stack.push(g);
                    }
                }
                Expr::Num(r) => {
                    if r.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= r;
                }
                Expr::Parity(a, b, c) => {
                    parity = (parity.0 ^ a, parity.1 ^ b, parity.2 ^ c);
                }
                Expr::PowLin(p) => {
                    let e = powlin_acc.entry(p.base).or_insert((0, 0, 0));
                    e.0 += p.a;
                    e.1 += p.b;
                    e.2 += p.c;
                }
                Expr::Pow(b, k) => {
                    *pow_acc.entry(*b).or_insert_with(BigRational::zero) += big(k);
                }
                Expr::Root(b, q) => {
                    *pow_acc.entry(*b).or_insert_with(BigRational::zero) += q;
                }
                other => {
                    *pow_acc.entry(other).or_insert_with(BigRational::zero) += BigRational::one();
                }
            }
        }
        let mut out: Vec<Expr> = Vec::new();
        for (base, exp) in pow_acc {
            if exp.is_zero() {
                continue;
            }
            let rebuilt = if exp.is_one() {
                base
            } else if exp.is_integer() {
                Expr::pow(base, int_value(&exp))
            } else {
                Expr::root_pow(base, exp)
            };
            match rebuilt {
                Expr::Num(r) => {
                    if r.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= r;
                }
                e => out.push(e),
            }
        }
        match Expr::parity(i64::from(parity.0), i64::from(parity.1), i64::from(parity.2)) {
            Expr::Num(r) => coeff *= r,
            e => out.push(e),
        }
        for (base, (a, b, c)) in powlin_acc {
            match Expr::pow_lin(base, a, b, c) {
                Expr::Num(r) => coeff *= r,
                e => out.push(e),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if !coeff.is_one() || out.is_empty() {
            out.push(Expr::Num(coeff));
        }
        out.sort();
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().expect("length checked"),
            _ => Expr::Prod(out),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::mul(vec![a, Expr::pow(b, -1)])
    }

    /// Integer power. `0^k` folds for positive `k`; `0^negative` panics, and a
    /// symbolic base that evaluates to zero surfaces later as a domain error.
    pub fn pow(base: Expr, k: i64) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k == 1 {
            return base;
        }
        match base {
            Expr::Num(r) => {
                assert!(!(r.is_zero() && k < 0), "zero base with negative exponent");
                if r.is_zero() {
                    Expr::zero()
                } else {
                    Expr::Num(rational_pow(&r, k))
                }
            }
            Expr::Prod(fs) => Expr::mul(fs.into_iter().map(|f| Expr::pow(f, k)).collect()),
            Expr::Pow(b, k2) => Expr::pow(*b, k * k2),
            Expr::Root(b, q) => Expr::root_pow(*b, q * big(k)),
            Expr::Parity(a, b, c) => {
                Expr::parity(i64::from(a) * k, i64::from(b) * k, i64::from(c) * k)
            }
            Expr::PowLin(p) => Expr::pow_lin(p.base, p.a * k, p.b * k, p.c * k),
            other => Expr::Pow(Box::new(other), k),
        }
    }

    /// Rational power; integer exponents fall back to [`Expr::pow`].
    pub fn root_pow(base: Expr, q: BigRational) -> Expr {
        if q.is_integer() {
            return Expr::pow(base, int_value(&q));
        }
        match base {
            Expr::Root(b, q2) => Expr::root_pow(*b, q * q2),
            Expr::Pow(b, k) => {
                // (x^k)^q folds to x^(k·q) only when that preserves values on
                // the real line: odd k keeps the sign domain (x^k ≥ 0 iff
                // x ≥ 0), and an even integer total exponent erases the
                // absolute value. sqrt(x^2) stays put — it is |x|, not x.
                let total = q.clone() * big(k);
                let safe = k % 2 != 0 || (total.is_integer() && int_value(&total) % 2 == 0);
                if safe {
                    Expr::root_pow(*b, total)
                } else {
                    Expr::Root(Box::new(Expr::Pow(b, k)), q)
                }
            }
            Expr::Num(r) => {
                // Fold perfect squares so that sqrt(4) becomes 2.
                if *q.denom() == BigInt::from(2) && !r.is_negative() {
                    let (ns, ds) = (r.numer().sqrt(), r.denom().sqrt());
                    if &(&ns * &ns) == r.numer() && &(&ds * &ds) == r.denom() {
                        let root = BigRational::new(ns, ds);
                        return Expr::Num(rational_pow(&root, int_value(&(q * big(2)))));
                    }
                }
                Expr::Root(Box::new(Expr::Num(r)), q)
            }
            other => Expr::Root(Box::new(other), q),
        }
    }

    pub fn sqrt(base: Expr) -> Expr {
        Expr::root_pow(base, BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn ln(base: Expr) -> Expr {
        if let Expr::Num(r) = &base {
            if r.is_one() {
                return Expr::zero();
            }
        }
        Expr::Ln(Box::new(base))
    }

    /// Structural zero test (exact, not probabilistic).
    pub fn is_zero_expr(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_zero())
    }

    pub fn is_one_expr(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_one())
    }

    /// The constant value if the expression is a plain rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Expr::Num(r) => Some(r),
            _ => None,
        }
    }

    /// All lattice variables occurring in the expression.
    pub fn lattice_vars(&self) -> BTreeSet<LatticeVar> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                out.insert(*v);
            }
        });
        out
    }

    /// All scalar symbols occurring in the expression (not `m`/`n` positions
    /// hidden inside parity or linear-exponent factors).
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Sym(s) = e {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Whether any lattice variable of the given family occurs.
    pub fn has_family(&self, family: Family) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                if v.family == family {
                    found = true;
                }
            }
        });
        found
    }

    /// True when the expression contains a logarithm or fractional power, in
    /// which case exact rational evaluation is unavailable.
    pub fn needs_float(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e, Expr::Ln(_) | Expr::Root(_, _)) {
                found = true;
            }
        });
        found
    }

    /// Depth-first traversal over all nodes.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Sum(ts) | Expr::Prod(ts) => {
                for t in ts {
                    t.visit(f);
                }
            }
            Expr::Pow(b, _) | Expr::Root(b, _) | Expr::Ln(b) => b.visit(f),
            _ => {}
        }
    }

    /// Rebuild through the smart constructors; a fixed point of itself.
    pub fn normalized(&self) -> Expr {
        match self {
            Expr::Sum(ts) => Expr::add(ts.iter().map(Expr::normalized).collect()),
            Expr::Prod(fs) => Expr::mul(fs.iter().map(Expr::normalized).collect()),
            Expr::Pow(b, k) => Expr::pow(b.normalized(), *k),
            Expr::Root(b, q) => Expr::root_pow(b.normalized(), q.clone()),
            Expr::Ln(b) => Expr::ln(b.normalized()),
            Expr::Parity(a, b, c) => Expr::parity(i64::from(*a), i64::from(*b), i64::from(*c)),
            Expr::PowLin(p) => Expr::pow_lin(p.base.clone(), p.a, p.b, p.c),
            leaf => leaf.clone(),
        }
    }

    /// The additive terms (a non-sum is a single term).
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Sum(ts) => ts.clone(),
            other => vec![other.clone()],
        }
    }

    /// The multiplicative factors (a non-product is a single factor).
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::Prod(fs) => fs.clone(),
            other => vec![other.clone()],
        }
    }
}

fn int_value(r: &BigRational) -> i64 {
    use num_traits::ToPrimitive;
    r.to_integer().to_i64().expect("exponent out of i64 range")
}

/// Split a (non-sum) term into its rational coefficient and the sorted list of
/// remaining factors, which acts as a collection key.
fn split_term(t: Expr) -> (BigRational, Vec<Expr>) {
    match t {
        Expr::Num(r) => (r, Vec::new()),
        Expr::Prod(fs) => {
            let mut coeff = BigRational::one();
            let mut key = Vec::new();
            for f in fs {
                match f {
                    Expr::Num(r) => coeff *= r,
                    other => key.push(other),
                }
            }
            (coeff, key)
        }
        other => (BigRational::one(), vec![other]),
    }
}

fn term_from(coeff: BigRational, mut key: Vec<Expr>) -> Expr {
    if key.is_empty() {
        return Expr::Num(coeff);
    }
    if coeff.is_one() {
        return if key.len() == 1 { key.pop().expect("length checked") } else { Expr::Prod(key) };
    }
    let mut fs = Vec::with_capacity(key.len() + 1);
    fs.push(Expr::Num(coeff));
    fs.append(&mut key);
    Expr::Prod(fs)
}

impl core::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs])
    }
}

impl core::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl core::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs])
    }
}

impl core::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
