//! Integrand expressions: parsing, printing, evaluation and symbolic
//! differentiation.
//!
//! Trees are immutable once built. Literals are kept as exact rationals so
//! the same tree can be evaluated at any precision without a second parse.

mod diff;
mod eval;
mod parse;

use std::fmt;

use rug::ops::Pow;
use rug::Rational;

pub use eval::{DomainError, DomainErrorKind};
pub use parse::{parse, ParseError, ParseErrorKind};

/// Expression tree in the single free variable `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Non-negative exact literal. Negative values are `Neg(Const(..))`.
    Const(Rational),
    Var,
    Pi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with an exponent free of `x`.
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::constant(Rational::from(v))
    }

    /// A constant of either sign, negative values wrapped in `Neg`.
    pub fn constant(q: Rational) -> Expr {
        if q < 0 {
            Expr::Neg(Box::new(Expr::Const(-q)))
        } else {
            Expr::Const(q)
        }
    }

    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Const(_) | Expr::Pi => false,
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Sqrt(a) => a.depends_on_x(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.depends_on_x() || b.depends_on_x(),
        }
    }

    /// Exact value when the tree is a rational combination of literals.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Expr::Const(q) => Some(q.clone()),
            Expr::Neg(a) => a.as_rational().map(|q| -q),
            Expr::Add(a, b) => Some(a.as_rational()? + b.as_rational()?),
            Expr::Sub(a, b) => Some(a.as_rational()? - b.as_rational()?),
            Expr::Mul(a, b) => Some(a.as_rational()? * b.as_rational()?),
            Expr::Div(a, b) => {
                let d = b.as_rational()?;
                if d == 0 {
                    None
                } else {
                    Some(a.as_rational()? / d)
                }
            }
            Expr::Pow(a, b) => {
                let base = a.as_rational()?;
                let exp = b.as_rational()?;
                if !exp.is_integer() || exp.numer().significant_bits() > 16 {
                    return None;
                }
                let e = exp.numer().to_i32()?;
                if base == 0 && e < 0 {
                    return None;
                }
                let mut out = Rational::from(1);
                for _ in 0..e.unsigned_abs() {
                    out *= &base;
                }
                Some(if e < 0 { out.recip() } else { out })
            }
            Expr::Var | Expr::Pi | Expr::Sin(_) | Expr::Cos(_) | Expr::Sqrt(_) => None,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var | Expr::Pi => 1,
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Sqrt(a) => 1 + a.size(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// The `order`-th derivative.
    pub fn nth_derivative(&self, order: usize) -> Expr {
        let mut e = self.clone();
        for _ in 0..order {
            e = e.derivative();
        }
        e
    }

    // Smart constructors with the additive and multiplicative identities
    // folded away. The parser builds nodes directly so that parsing stays
    // structural.

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            return Expr::Const(Rational::from(x + y));
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return Expr::neg(b);
        }
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            return Expr::constant(Rational::from(x - y));
        }
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::int(0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            return Expr::Const(Rational::from(x * y));
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        if b.is_one() {
            return a;
        }
        if a.is_zero() {
            return Expr::int(0);
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Neg(inner) => *inner,
            e if e.is_zero() => e,
            e => Expr::Neg(Box::new(e)),
        }
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        if exp.is_zero() {
            return Expr::int(1);
        }
        if exp.is_one() {
            return base;
        }
        Expr::Pow(Box::new(base), Box::new(exp))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(Box::new(a))
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::Cos(Box::new(a))
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::Sqrt(Box::new(a))
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(q) if *q == 0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(q) if *q == 1)
    }
}

/// Writes a non-negative rational as a terminating decimal when it has one,
/// otherwise as a parenthesized fraction.
fn write_rational(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    if q.is_integer() {
        return write!(f, "{}", q.numer());
    }
    let mut den = q.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den.is_divisible_u(2) {
        den /= 2;
        twos += 1;
    }
    while den.is_divisible_u(5) {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return write!(f, "({}/{})", q.numer(), q.denom());
    }
    let scale = twos.max(fives);
    let scaled = Rational::from(q * rug::Integer::from(10).pow(scale));
    let digits = scaled.numer().to_string();
    let width = scale as usize + 1;
    let digits = format!("{digits:0>width$}");
    let (int, frac) = digits.split_at(digits.len() - scale as usize);
    write!(f, "{int}.{frac}")
}

impl fmt::Display for Expr {
    /// Canonical fully parenthesized infix; parses back to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(q) => write_rational(f, q),
            Expr::Var => f.write_str("x"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_decimals_exactly() {
        assert_eq!(Expr::Const(Rational::from((1, 2))).to_string(), "0.5");
        assert_eq!(Expr::Const(Rational::from((1, 40))).to_string(), "0.025");
        assert_eq!(Expr::Const(Rational::from((7, 1))).to_string(), "7");
        assert_eq!(Expr::Const(Rational::from((1, 3))).to_string(), "(1/3)");
        assert_eq!(Expr::int(-2).to_string(), "(-2)");
    }

    #[test]
    fn identities_fold() {
        assert_eq!(Expr::add(Expr::int(0), Expr::Var), Expr::Var);
        assert_eq!(Expr::mul(Expr::int(1), Expr::Var), Expr::Var);
        assert_eq!(Expr::mul(Expr::int(0), Expr::Var), Expr::int(0));
        assert_eq!(Expr::sub(Expr::int(1), Expr::int(3)), Expr::int(-2));
        assert_eq!(Expr::neg(Expr::neg(Expr::Var)), Expr::Var);
    }

    #[test]
    fn rational_folding() {
        let e = parse("(-1/2)^2 + 3").unwrap();
        assert_eq!(e.as_rational(), Some(Rational::from((13, 4))));
        assert!(parse("2^x").is_err());
        assert_eq!(parse("pi").unwrap().as_rational(), None);
        assert!(!parse("sin(pi)").unwrap().depends_on_x());
    }
}
