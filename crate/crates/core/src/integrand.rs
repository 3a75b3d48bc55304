//! Integrands: an expression, its interval and an optional closed-form value.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::Error;
use crate::expr::{parse, DomainError, Expr};
use crate::real::{Precision, Real};

/// Derivative orders cached per integrand; higher orders are rebuilt on use.
pub const CACHED_DERIVATIVES: usize = 6;

/// Integration interval with `a < b` at some working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    a: Real,
    b: Real,
}

impl Interval {
    pub fn new(a: Real, b: Real) -> Result<Self, Error> {
        if a < b {
            Ok(Interval { a, b })
        } else {
            Err(Error::InvalidInterval {
                a: a.to_string(),
                b: b.to_string(),
            })
        }
    }

    pub fn a(&self) -> &Real {
        &self.a
    }

    pub fn b(&self) -> &Real {
        &self.b
    }

    pub fn width(&self) -> Real {
        &self.b - &self.a
    }

    pub fn midpoint(&self) -> Real {
        let two = Real::from_i64(2, self.a.precision().max(self.b.precision()));
        (&self.a + &self.b) / two
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// The three integrals of pi used as showcases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `2 sin^2 x` on `[0, pi]`.
    Sin2,
    /// `6 / sqrt(1 - x^2)` on `[0, 1/2]`.
    Asin6,
    /// `2 / (1 + x^2)` on `[-1, 1]`.
    Atan2,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Sin2, Builtin::Asin6, Builtin::Atan2];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin2 => "sin2",
            Builtin::Asin6 => "asin6",
            Builtin::Atan2 => "atan2",
        }
    }

    /// Showcase number, 1 to 3.
    pub fn example(self) -> u8 {
        match self {
            Builtin::Sin2 => 1,
            Builtin::Asin6 => 2,
            Builtin::Atan2 => 3,
        }
    }

    pub fn from_example(n: u8) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.example() == n)
    }

    fn texts(self) -> (&'static str, &'static str, &'static str) {
        match self {
            Builtin::Sin2 => ("2*sin(x)^2", "0", "pi"),
            Builtin::Asin6 => ("6/sqrt(1-x^2)", "0", "1/2"),
            Builtin::Atan2 => ("2/(1+x^2)", "-1", "1"),
        }
    }

    pub fn integrand(self) -> Integrand {
        let (f, a, b) = self.texts();
        Integrand::parse(f, a, b)
            .and_then(|i| i.with_reference(Expr::Pi))
            .expect("builtin integrands are well formed")
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownIntegrand(s.to_string()))
    }
}

/// An integrand `f` over `[lower, upper]`. Bounds and the optional reference
/// value are kept symbolic so they can be materialized at any precision.
#[derive(Clone, Debug)]
pub struct Integrand {
    expr: Expr,
    lower: Expr,
    upper: Expr,
    reference: Option<Expr>,
    derivatives: [OnceLock<Expr>; CACHED_DERIVATIVES],
}

fn constant(e: Expr) -> Result<Expr, Error> {
    if e.depends_on_x() {
        Err(Error::NotConstant(e.to_string()))
    } else {
        Ok(e)
    }
}

impl Integrand {
    pub fn new(expr: Expr, lower: Expr, upper: Expr) -> Result<Self, Error> {
        Ok(Integrand {
            expr,
            lower: constant(lower)?,
            upper: constant(upper)?,
            reference: None,
            derivatives: std::array::from_fn(|_| OnceLock::new()),
        })
    }

    pub fn parse(f: &str, lower: &str, upper: &str) -> Result<Self, Error> {
        Integrand::new(parse(f)?, parse(lower)?, parse(upper)?)
    }

    /// Attaches the exact value of the integral.
    pub fn with_reference(mut self, value: Expr) -> Result<Self, Error> {
        self.reference = Some(constant(value)?);
        Ok(self)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn bounds(&self) -> (&Expr, &Expr) {
        (&self.lower, &self.upper)
    }

    pub fn reference_expr(&self) -> Option<&Expr> {
        self.reference.as_ref()
    }

    /// The `order`-th derivative expression; order 0 is `f` itself.
    pub fn derivative(&self, order: usize) -> std::borrow::Cow<'_, Expr> {
        use std::borrow::Cow;
        match order {
            0 => Cow::Borrowed(&self.expr),
            k if k <= CACHED_DERIVATIVES => Cow::Borrowed(
                self.derivatives[k - 1].get_or_init(|| self.derivative(k - 1).derivative()),
            ),
            k => Cow::Owned(self.expr.nth_derivative(k)),
        }
    }

    pub fn eval(&self, x: &Real, prec: Precision) -> Result<Real, DomainError> {
        self.expr.eval(x, prec)
    }

    pub fn eval_derivative(
        &self,
        order: usize,
        x: &Real,
        prec: Precision,
    ) -> Result<Real, DomainError> {
        self.derivative(order).eval(x, prec)
    }

    pub fn interval(&self, prec: Precision) -> Result<Interval, Error> {
        Interval::new(
            self.lower.eval_constant(prec)?,
            self.upper.eval_constant(prec)?,
        )
    }

    pub fn reference(&self, prec: Precision) -> Option<Result<Real, Error>> {
        self.reference
            .as_ref()
            .map(|r| r.eval_constant(prec).map_err(Error::from))
    }
}

impl fmt::Display for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on [{}, {}]", self.expr, self.lower, self.upper)
    }
}
