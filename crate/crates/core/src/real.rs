//! Binary floating point values at a caller-chosen precision.
//!
//! [`Real`] wraps an MPFR float. Every arithmetic operation rounds once to
//! nearest at the larger of the operand precisions, so 53-bit values behave
//! like IEEE doubles and extended precisions are deterministic for a fixed
//! bit count. `sin`, `cos`, `sqrt` and `pow` are correctly rounded as well.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::Error;

const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Working precision in bits of significand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    /// IEEE binary64.
    pub const DOUBLE: Precision = Precision(53);
    pub const EXTENDED: Precision = Precision(128);
    pub const MIN_BITS: u32 = 2;
    pub const MAX_BITS: u32 = 1 << 20;

    pub fn new(bits: u32) -> Result<Self, Error> {
        if (Self::MIN_BITS..=Self::MAX_BITS).contains(&bits) {
            Ok(Precision(bits))
        } else {
            Err(Error::InvalidPrecision(bits))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// This precision plus `extra` guard bits.
    pub fn with_guard(self, extra: u32) -> Self {
        Precision((self.0 + extra).min(Self::MAX_BITS))
    }

    pub fn is_double(self) -> bool {
        self.0 == 53
    }

    /// Decimal digits fully determined by the significand, `floor(p log10 2)`.
    pub fn decimal_digits(self) -> usize {
        (f64::from(self.0) * LOG10_2).floor() as usize
    }

    /// Significant digits that guarantee a decimal round trip.
    pub fn round_trip_digits(self) -> usize {
        (f64::from(self.0) * LOG10_2).ceil() as usize + 1
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DOUBLE
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite real number rounded to a fixed binary precision.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    pub fn zero(prec: Precision) -> Self {
        Real(Float::new(prec.bits()))
    }

    pub fn from_i64(v: i64, prec: Precision) -> Self {
        Real(Float::with_val(prec.bits(), v))
    }

    pub fn from_f64(v: f64, prec: Precision) -> Self {
        Real(Float::with_val(prec.bits(), v))
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_rational(q: &Rational, prec: Precision) -> Self {
        Real(Float::with_val(prec.bits(), q))
    }

    pub fn pi(prec: Precision) -> Self {
        Real(Float::with_val(prec.bits(), Constant::Pi))
    }

    /// Parses a decimal literal (`3.25`, `-1e-3`, `inf` is rejected).
    pub fn parse_decimal(text: &str, prec: Precision) -> Result<Self, Error> {
        let parsed =
            Float::parse(text.trim()).map_err(|_| Error::InvalidNumber(text.to_string()))?;
        let value = Float::with_val(prec.bits(), parsed);
        if value.is_finite() {
            Ok(Real(value))
        } else {
            Err(Error::InvalidNumber(text.to_string()))
        }
    }

    pub fn precision(&self) -> Precision {
        Precision(self.0.prec())
    }

    /// Rounds (or exactly widens) to `prec`.
    pub fn to_precision(&self, prec: Precision) -> Self {
        Real(Float::with_val(prec.bits(), &self.0))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> Rational {
        self.0.to_rational().expect("Real values are finite")
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Real {
        Real(Float::with_val(self.0.prec(), self.0.abs_ref()))
    }

    pub fn sqrt(&self) -> Real {
        Real(Float::with_val(self.0.prec(), self.0.sqrt_ref()))
    }

    pub fn sin(&self) -> Real {
        Real(Float::with_val(self.0.prec(), self.0.sin_ref()))
    }

    pub fn cos(&self) -> Real {
        Real(Float::with_val(self.0.prec(), self.0.cos_ref()))
    }

    pub fn log2(&self) -> Real {
        Real(Float::with_val(self.0.prec(), self.0.log2_ref()))
    }

    pub fn powi(&self, exp: i32) -> Real {
        Real(Float::with_val(self.0.prec(), (&self.0).pow(exp)))
    }

    pub fn pow(&self, exp: &Real) -> Real {
        let prec = self.0.prec().max(exp.0.prec());
        Real(Float::with_val(prec, (&self.0).pow(&exp.0)))
    }

    pub fn min<'a>(&'a self, other: &'a Real) -> &'a Real {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max<'a>(&'a self, other: &'a Real) -> &'a Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Unit in the last place of `self` at its own precision.
    pub fn ulp(&self) -> Real {
        let prec = self.0.prec();
        let exp = self.0.get_exp().unwrap_or(0);
        let two = Float::with_val(prec, 2);
        Real(Float::with_val(prec, two.pow(exp - prec as i32)))
    }

    /// Decimal digits `(negative, digits, exponent)` where the value is
    /// `0.digits * 10^exponent`. Zero has exponent 0.
    pub fn decimal_parts(&self, digits: Option<usize>, round: Round) -> (bool, String, i32) {
        let (neg, s, exp) = self.0.to_sign_string_exp_round(10, digits, round);
        (neg, s, exp.unwrap_or(0))
    }

    /// Scientific notation, e.g. `-1.25e-3`. With `digits == None` the text
    /// round-trips exactly at this precision.
    pub fn to_scientific(&self, digits: Option<usize>) -> String {
        if self.is_zero() {
            return "0e0".to_string();
        }
        if digits.is_none() && self.precision().is_double() {
            return format!("{:e}", self.to_f64());
        }
        let (neg, s, exp) = self.decimal_parts(digits, Round::Nearest);
        let s = s.trim_end_matches('0');
        let (head, tail) = s.split_at(1);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        out.push_str(&format!("e{}", exp - 1));
        out
    }

    /// Human-readable positional decimal: shortest round trip at 53 bits,
    /// `floor(p log10 2) - 2` significant digits otherwise.
    pub fn to_display_string(&self) -> String {
        let prec = self.precision();
        if prec.is_double() {
            return format!("{}", self.to_f64());
        }
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = prec.decimal_digits().saturating_sub(2).max(1);
        let (neg, s, exp) = self.decimal_parts(Some(digits), Round::Nearest);
        if !(-20..=40).contains(&exp) {
            return self.to_scientific(Some(digits));
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if exp <= 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp) as usize));
            out.push_str(&s);
        } else if exp as usize >= s.len() {
            out.push_str(&s);
            out.extend(std::iter::repeat_n('0', exp as usize - s.len()));
        } else {
            let (int, frac) = s.split_at(exp as usize);
            out.push_str(int);
            out.push('.');
            out.push_str(frac);
        }
        out
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_display_string())
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                let prec = self.0.prec().max(rhs.0.prec());
                Real(Float::with_val(prec, (&self.0).$method(&rhs.0)))
            }
        }

        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $trait<&'a Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.0.prec(), -&self.0))
    }
}

/// Field operations shared by [`Real`] and exact rationals, so rule
/// formulas can be written once and evaluated either way.
pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    /// The integer `n` in the same number system (and precision) as `self`.
    fn integer(&self, n: i64) -> Self;
}

impl Scalar for Real {
    fn integer(&self, n: i64) -> Self {
        Real::from_i64(n, self.precision())
    }
}

impl Scalar for Rational {
    fn integer(&self, n: i64) -> Self {
        Rational::from(n)
    }
}

/// Running sum with Neumaier compensation, carried at the precision of the
/// first term.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Real,
    compensation: Real,
}

impl CompensatedSum {
    pub fn new(prec: Precision) -> Self {
        CompensatedSum {
            sum: Real::zero(prec),
            compensation: Real::zero(prec),
        }
    }

    pub fn add(&mut self, term: &Real) {
        let t = &self.sum + term;
        let lost = if self.sum.abs() >= term.abs() {
            (&self.sum - &t) + term
        } else {
            (term - &t) + &self.sum
        };
        self.compensation = &self.compensation + &lost;
        self.sum = t;
    }

    pub fn total(&self) -> Real {
        &self.sum + &self.compensation
    }
}
