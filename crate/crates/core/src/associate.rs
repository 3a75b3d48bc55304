//! Companion pairs, their associate rules, and brackets for the integral.
//!
//! Two rules of equal degree `m` whose errors have opposite signs are
//! companions. Writing their errors as `+(b-a)^(m+2) f^(m+1) / d1` and
//! `-(b-a)^(m+2) f^(m+1) / d2`, the weighted mean `(d1 X + d2 Y)/(d1 + d2)`
//! cancels the leading error terms. Reducing `d1, d2` by their gcd gives the
//! integer weights of the associate rule. When `f^(m+1)` keeps one sign on
//! `[a, b]` the integral lies between `X` and `Y`.

use std::fmt;

use crate::error::Error;
use crate::expr::DomainErrorKind;
use crate::integrand::{Integrand, Interval};
use crate::real::{Precision, Real, Scalar};
use crate::rules::{ErrorSign, Rule};

/// Default number of equispaced samples for sign checks, `2^8 + 1`.
pub const DEFAULT_SAMPLES: usize = 257;

/// Coprime integer weights `(c1, c2)` of an associate rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AssociateWeights {
    pub c1: u64,
    pub c2: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(d1 / g, d2 / g)` with `g = gcd(d1, d2)`.
///
/// Panics if either denominator is zero.
pub fn derive_weights(d1: u64, d2: u64) -> AssociateWeights {
    assert!(d1 > 0 && d2 > 0, "error denominators must be positive");
    let g = gcd(d1, d2);
    AssociateWeights {
        c1: d1 / g,
        c2: d2 / g,
    }
}

/// `(c1 x + c2 y) / (c1 + c2)`.
pub fn associate_value<V: Scalar>(x: &V, y: &V, w: AssociateWeights) -> V {
    // x + c2 (y - x) / (c1 + c2): the step is strictly shorter than y - x
    // after rounding, so the result never leaves [min(x, y), max(x, y)].
    let c2 = x.integer(w.c2 as i64);
    let total = x.integer((w.c1 + w.c2) as i64);
    x.clone() + c2 * (y.clone() - x.clone()) / total
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bracket {
    lo: Real,
    hi: Real,
}

impl Bracket {
    pub fn lo(&self) -> &Real {
        &self.lo
    }

    pub fn hi(&self) -> &Real {
        &self.hi
    }

    pub fn width(&self) -> Real {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Real) -> bool {
        &self.lo <= v && v <= &self.hi
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `[min(x, y), max(x, y)]`.
pub fn bracket(x: &Real, y: &Real) -> Bracket {
    Bracket {
        lo: x.min(y).clone(),
        hi: x.max(y).clone(),
    }
}

/// A positive rule and a negative rule of the same degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompanionPair {
    positive: Rule,
    negative: Rule,
}

impl CompanionPair {
    pub const LR: CompanionPair = CompanionPair {
        positive: Rule::L,
        negative: Rule::R,
    };
    pub const MT: CompanionPair = CompanionPair {
        positive: Rule::M,
        negative: Rule::T,
    };
    pub const T2S: CompanionPair = CompanionPair {
        positive: Rule::T2,
        negative: Rule::S,
    };
    pub const ALL: [CompanionPair; 3] = [Self::LR, Self::MT, Self::T2S];

    /// Pairs two rules in either order, checking degrees and error signs.
    pub fn new(x: Rule, y: Rule) -> Result<Self, Error> {
        let (mx, my) = (x.meta(), y.meta());
        let reject = || Error::NotCompanions(x.to_string(), y.to_string());
        if mx.degree != my.degree
            || mx.error_denominator.is_none()
            || my.error_denominator.is_none()
        {
            return Err(reject());
        }
        match (mx.error_sign, my.error_sign) {
            (ErrorSign::Positive, ErrorSign::Negative) => Ok(CompanionPair {
                positive: x,
                negative: y,
            }),
            (ErrorSign::Negative, ErrorSign::Positive) => Ok(CompanionPair {
                positive: y,
                negative: x,
            }),
            _ => Err(reject()),
        }
    }

    pub fn positive(self) -> Rule {
        self.positive
    }

    pub fn negative(self) -> Rule {
        self.negative
    }

    pub fn degree(self) -> u32 {
        self.positive.meta().degree
    }

    /// Order of the derivative whose sign decides the bracket, `m + 1`.
    pub fn derivative_order(self) -> usize {
        self.degree() as usize + 1
    }

    pub fn weights(self) -> AssociateWeights {
        let d = |r: Rule| u64::from(r.meta().error_denominator.expect("companions carry d"));
        derive_weights(d(self.positive), d(self.negative))
    }

    /// The associate rule, when it is one of the named rules.
    pub fn associate(self) -> Option<Rule> {
        match (self.positive, self.negative) {
            (Rule::L, Rule::R) => Some(Rule::T),
            (Rule::M, Rule::T) => Some(Rule::S),
            (Rule::T2, Rule::S) => Some(Rule::Q),
            _ => None,
        }
    }

    pub fn label(self) -> String {
        format!("{}{}", self.positive, self.negative)
    }

    pub fn from_label(label: &str) -> Option<CompanionPair> {
        CompanionPair::ALL.into_iter().find(|p| p.label() == label)
    }
}

impl fmt::Display for CompanionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.positive, self.negative)
    }
}

/// Outcome of sampling the sign of a derivative over an interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    AllPositive,
    AllNegative,
    IdenticallyZero,
    /// First sampled subinterval across which the sign flips.
    SignChange {
        lo: Real,
        hi: Real,
    },
    /// Sampling produced a non-finite value.
    Unknown,
}

impl Verdict {
    /// Short code used in tables: `A+`, `A-`, `A0`, `A!`, `A?`.
    pub fn code(&self) -> &'static str {
        match self {
            Verdict::AllPositive => "A+",
            Verdict::AllNegative => "A-",
            Verdict::IdenticallyZero => "A0",
            Verdict::SignChange { .. } => "A!",
            Verdict::Unknown => "A?",
        }
    }

    /// The companion bracket is certified to contain the integral.
    pub fn certifies(&self) -> bool {
        matches!(
            self,
            Verdict::AllPositive | Verdict::AllNegative | Verdict::IdenticallyZero
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::SignChange { lo, hi } => {
                write!(f, "{} sign change in [{lo}, {hi}]", self.code())
            }
            v => f.write_str(v.code()),
        }
    }
}

/// Samples `f^(order)` at `samples` equispaced points of `iv` (endpoints
/// included) and reports whether its sign is constant.
///
/// Values within `2^-(p-8)` times the largest sampled magnitude count as
/// zero and do not break a uniform sign.
pub fn check_assumption_a(
    f: &Integrand,
    order: usize,
    iv: &Interval,
    samples: usize,
    prec: Precision,
) -> Result<Verdict, Error> {
    let samples = samples.max(2);
    let derivative = f.derivative(order);
    let steps = Real::from_i64(samples as i64 - 1, prec);
    let step = iv.width().to_precision(prec) / steps;
    let mut points = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = if i + 1 == samples {
            iv.b().to_precision(prec)
        } else {
            iv.a() + &(Real::from_i64(i as i64, prec) * &step)
        };
        match derivative.eval(&x, prec) {
            Ok(v) => values.push(v),
            Err(e) if e.kind == DomainErrorKind::NonFinite => return Ok(Verdict::Unknown),
            Err(e) => return Err(e.into()),
        }
        points.push(x);
    }

    let largest = values
        .iter()
        .map(Real::abs)
        .fold(Real::zero(prec), |m, v| m.max(&v).clone());
    let scale = Real::from_i64(2, prec).powi(-(prec.bits() as i32 - 8));
    let tol = largest * scale;
    let mut last: Option<(usize, i32)> = None;
    for (i, v) in values.iter().enumerate() {
        if v.abs() <= tol {
            continue;
        }
        let sign = v.signum();
        match last {
            Some((j, s)) if s != sign => {
                return Ok(Verdict::SignChange {
                    lo: points[j].clone(),
                    hi: points[i].clone(),
                });
            }
            _ => last = Some((i, sign)),
        }
    }
    Ok(match last {
        None => Verdict::IdenticallyZero,
        Some((_, 1)) => Verdict::AllPositive,
        Some(_) => Verdict::AllNegative,
    })
}

/// Values of a companion pair, their associate, and the enclosing bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionBracket {
    pub pair: CompanionPair,
    pub positive_value: Real,
    pub negative_value: Real,
    pub associate_value: Real,
    pub bracket: Bracket,
    pub verdict: Verdict,
}

impl CompanionBracket {
    pub fn new(
        pair: CompanionPair,
        positive_value: Real,
        negative_value: Real,
        verdict: Verdict,
    ) -> Self {
        let associate = associate_value(&positive_value, &negative_value, pair.weights());
        let bracket = bracket(&positive_value, &negative_value);
        CompanionBracket {
            pair,
            positive_value,
            negative_value,
            associate_value: associate,
            bracket,
            verdict,
        }
    }

    /// False when the sign check failed; the bracket is then reported but
    /// not guaranteed.
    pub fn verified(&self) -> bool {
        self.verdict.certifies()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrand::Builtin;

    const P: Precision = Precision::DOUBLE;

    fn r(v: f64) -> Real {
        Real::from_f64(v, P)
    }

    #[test]
    fn weights_of_named_pairs() {
        assert_eq!(derive_weights(2, 2), AssociateWeights { c1: 1, c2: 1 });
        assert_eq!(derive_weights(24, 12), AssociateWeights { c1: 2, c2: 1 });
        assert_eq!(
            derive_weights(1920, 2880),
            AssociateWeights { c1: 2, c2: 3 }
        );
        assert_eq!(CompanionPair::LR.weights(), derive_weights(2, 2));
        assert_eq!(CompanionPair::MT.weights(), derive_weights(24, 12));
        assert_eq!(CompanionPair::T2S.weights(), derive_weights(1920, 2880));
    }

    #[test]
    fn weights_ignore_common_factors() {
        for (d1, d2) in [(2, 2), (24, 12), (1920, 2880), (7, 5)] {
            for k in 1..=10 {
                assert_eq!(derive_weights(k * d1, k * d2), derive_weights(d1, d2));
            }
        }
    }

    #[test]
    #[should_panic]
    fn zero_denominator_panics() {
        derive_weights(0, 3);
    }

    #[test]
    fn weighted_means() {
        let pi = Real::pi(P);
        let two_pi = &pi * &r(2.0);
        let v = associate_value(&two_pi, &Real::zero(P), derive_weights(24, 12));
        let expected = 4.0 * std::f64::consts::PI / 3.0;
        assert!((v.to_f64() - expected).abs() <= v.ulp().to_f64(), "{v}");
        let same = r(1.75);
        assert_eq!(
            associate_value(&same, &same, derive_weights(1920, 2880)),
            same
        );
        let s = associate_value(&r(3.0984), &r(3.2321), derive_weights(24, 12)).to_f64();
        assert!((s - 3.1430).abs() < 5e-5, "{s}");
    }

    #[test]
    fn brackets_are_ordered() {
        let b = bracket(&r(4.0), &r(2.0));
        assert_eq!((b.lo().to_f64(), b.hi().to_f64()), (2.0, 4.0));
        assert!(b.contains(&Real::pi(P)));
        let d = bracket(&r(1.5), &r(1.5));
        assert!(d.width().is_zero());
        assert!(d.contains(&r(1.5)));
    }

    #[test]
    fn companion_pairs() {
        assert_eq!(
            CompanionPair::new(Rule::R, Rule::L).unwrap(),
            CompanionPair::LR
        );
        assert_eq!(
            CompanionPair::new(Rule::S, Rule::T2).unwrap(),
            CompanionPair::T2S
        );
        assert!(CompanionPair::new(Rule::L, Rule::M).is_err());
        assert!(CompanionPair::new(Rule::M, Rule::M).is_err());
        assert!(CompanionPair::new(Rule::T2, Rule::Q).is_err());
        assert_eq!(CompanionPair::MT.associate(), Some(Rule::S));
        assert_eq!(CompanionPair::T2S.derivative_order(), 4);
        assert_eq!(CompanionPair::from_label("T2S"), Some(CompanionPair::T2S));
    }

    #[test]
    fn sign_change_of_cosine() {
        let f = Builtin::Sin2.integrand();
        let iv = f.interval(P).unwrap();
        match check_assumption_a(&f, 2, &iv, DEFAULT_SAMPLES, P).unwrap() {
            Verdict::SignChange { lo, hi } => {
                let quarter = std::f64::consts::FRAC_PI_4;
                assert!(lo.to_f64() < quarter && quarter < hi.to_f64());
            }
            v => panic!("unexpected {v}"),
        }
    }

    #[test]
    fn increasing_integrand_is_positive() {
        let f = Builtin::Asin6.integrand();
        let iv = f.interval(P).unwrap();
        let v = check_assumption_a(&f, 1, &iv, DEFAULT_SAMPLES, P).unwrap();
        assert_eq!(v, Verdict::AllPositive);
        assert_eq!(v.code(), "A+");
    }

    #[test]
    fn constant_has_zero_derivative() {
        let f = Integrand::parse("3", "0", "1").unwrap();
        let iv = f.interval(P).unwrap();
        let v = check_assumption_a(&f, 1, &iv, DEFAULT_SAMPLES, P).unwrap();
        assert_eq!(v, Verdict::IdenticallyZero);
        assert!(v.certifies());
    }

    #[test]
    fn negative_and_unknown() {
        let f = Integrand::parse("-x^2", "0", "1").unwrap();
        let iv = f.interval(P).unwrap();
        assert_eq!(
            check_assumption_a(&f, 2, &iv, 9, P).unwrap(),
            Verdict::AllNegative
        );
        let g = Integrand::parse("sqrt(x)", "-1", "1").unwrap();
        let iv = g.interval(P).unwrap();
        assert!(check_assumption_a(&g, 0, &iv, 9, P).is_err());
    }
}
