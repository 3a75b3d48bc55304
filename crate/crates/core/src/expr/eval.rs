use thiserror::Error;

use super::Expr;
use crate::real::{Precision, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainErrorKind {
    SqrtOfNegative,
    DivisionByZero,
    /// Negative base raised to a non-integer power.
    NegativeBase,
    /// Result overflowed or is otherwise not a finite number.
    NonFinite,
}

/// Evaluation left the real domain at the node printed in `node`.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{} in `{node}`", describe(*kind))]
pub struct DomainError {
    pub kind: DomainErrorKind,
    pub node: String,
}

fn describe(kind: DomainErrorKind) -> &'static str {
    match kind {
        DomainErrorKind::SqrtOfNegative => "square root of a negative number",
        DomainErrorKind::DivisionByZero => "division by zero",
        DomainErrorKind::NegativeBase => "negative base with non-integer exponent",
        DomainErrorKind::NonFinite => "non-finite result",
    }
}

impl Expr {
    /// Value at `x`, with every operation rounded to `prec`.
    pub fn eval(&self, x: &Real, prec: Precision) -> Result<Real, DomainError> {
        let fail = |kind| DomainError {
            kind,
            node: self.to_string(),
        };
        let v = match self {
            Expr::Const(q) => Real::from_rational(q, prec),
            Expr::Var => x.to_precision(prec),
            Expr::Pi => Real::pi(prec),
            Expr::Neg(a) => -a.eval(x, prec)?,
            Expr::Add(a, b) => a.eval(x, prec)? + b.eval(x, prec)?,
            Expr::Sub(a, b) => a.eval(x, prec)? - b.eval(x, prec)?,
            Expr::Mul(a, b) => a.eval(x, prec)? * b.eval(x, prec)?,
            Expr::Div(a, b) => {
                let num = a.eval(x, prec)?;
                let den = b.eval(x, prec)?;
                if den.is_zero() {
                    return Err(fail(DomainErrorKind::DivisionByZero));
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(x, prec)?;
                match b.as_rational() {
                    Some(q) if q.is_integer() && q.numer().to_i32().is_some() => {
                        let n = q.numer().to_i32().unwrap_or(0);
                        if n < 0 && base.is_zero() {
                            return Err(fail(DomainErrorKind::DivisionByZero));
                        }
                        base.powi(n)
                    }
                    _ => {
                        let exp = b.eval(x, prec)?;
                        match base.signum() {
                            -1 => return Err(fail(DomainErrorKind::NegativeBase)),
                            0 if exp.signum() < 0 => {
                                return Err(fail(DomainErrorKind::DivisionByZero))
                            }
                            _ => base.pow(&exp),
                        }
                    }
                }
            }
            Expr::Sin(a) => a.eval(x, prec)?.sin(),
            Expr::Cos(a) => a.eval(x, prec)?.cos(),
            Expr::Sqrt(a) => {
                let arg = a.eval(x, prec)?;
                if arg.signum() < 0 {
                    return Err(fail(DomainErrorKind::SqrtOfNegative));
                }
                arg.sqrt()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fail(DomainErrorKind::NonFinite))
        }
    }

    /// Value of an `x`-free expression.
    pub fn eval_constant(&self, prec: Precision) -> Result<Real, DomainError> {
        self.eval(&Real::zero(prec), prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn real(v: f64) -> Real {
        Real::from_f64(v, Precision::DOUBLE)
    }

    #[test]
    fn sin_squared_at_half_pi() {
        let f = parse("2*sin(x)^2").unwrap();
        let p = Precision::DOUBLE;
        let v = f.eval(&(Real::pi(p) / Real::from_i64(2, p)), p).unwrap();
        assert_eq!(v.to_f64(), 2.0);
    }

    #[test]
    fn arcsine_integrand_at_half() {
        let f = parse("6/sqrt(1-x^2)").unwrap();
        let v = f.eval(&real(0.5), Precision::DOUBLE).unwrap().to_f64();
        assert!((v - 4.0 * 3f64.sqrt()).abs() < 1e-15);
        assert!((v - 6.9282032).abs() < 1e-7);
    }

    #[test]
    fn sqrt_of_negative_is_reported() {
        let f = parse("6/sqrt(1-x^2)").unwrap();
        let err = f.eval(&real(1.5), Precision::DOUBLE).unwrap_err();
        assert_eq!(err.kind, DomainErrorKind::SqrtOfNegative);
        assert_eq!(err.node, "sqrt((1 - (x ^ 2)))");
    }

    #[test]
    fn division_by_zero_is_reported() {
        let f = parse("6/sqrt(1-x^2)").unwrap();
        let err = f.eval(&real(1.0), Precision::DOUBLE).unwrap_err();
        assert_eq!(err.kind, DomainErrorKind::DivisionByZero);
        assert_eq!(
            parse("x^-1")
                .unwrap()
                .eval(&real(0.0), Precision::DOUBLE)
                .unwrap_err()
                .kind,
            DomainErrorKind::DivisionByZero
        );
    }

    #[test]
    fn real_powers() {
        let p = Precision::DOUBLE;
        let v = parse("x^0.5").unwrap().eval(&real(2.0), p).unwrap();
        assert_eq!(v.to_f64(), 2f64.sqrt());
        let err = parse("x^0.5").unwrap().eval(&real(-2.0), p).unwrap_err();
        assert_eq!(err.kind, DomainErrorKind::NegativeBase);
        let v = parse("x^3").unwrap().eval(&real(-2.0), p).unwrap();
        assert_eq!(v.to_f64(), -8.0);
        let v = parse("x^pi").unwrap().eval(&real(0.0), p).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn extended_precision_is_honoured() {
        let p = Precision::new(256).unwrap();
        let v = parse("4*(4*sin(pi/6)^2)")
            .unwrap()
            .eval_constant(p)
            .unwrap();
        assert_eq!(v.precision(), p);
        let four = Real::from_i64(4, p);
        assert!((v - four).abs().to_f64() < 1e-70);
    }
}
