//! The simple rules and their error metadata.
//!
//! | rule | degree | error sign  | d    | value                           |
//! |------|--------|-------------|------|---------------------------------|
//! | L    | 0      | positive    | 2    | `(b-a) f(a)`                    |
//! | R    | 0      | negative    | 2    | `(b-a) f(b)`                    |
//! | M    | 1      | positive    | 24   | `(b-a) f((a+b)/2)`              |
//! | T    | 1      | negative    | 12   | `(b-a)/2 (f(a) + f(b))`         |
//! | S    | 3      | negative    | 2880 | `(2M + T)/3`                    |
//! | T2   | 3      | positive    | 1920 | `M + (b-a)^3/24 f''((a+b)/2)`   |
//! | Q    | 3      | conditional | -    | `(2 T2 + 3 S)/5`                |
//!
//! Errors are `I(f) - rule(f)`. For a companion rule with denominator `d`
//! and degree `m` the error is `±(b-a)^(m+2) f^(m+1)(xi) / d`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::associate::{associate_value, CompanionPair};
use crate::error::Error;
use crate::integrand::{Integrand, Interval};
use crate::real::{Precision, Real, Scalar};

/// Rule identity. The derived `Ord` is the canonical column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    L,
    R,
    M,
    T,
    S,
    T2,
    Q,
}

/// Values keyed by rule, iterated in canonical order.
pub type RuleMap<V> = BTreeMap<Rule, V>;

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::L,
        Rule::R,
        Rule::M,
        Rule::T,
        Rule::S,
        Rule::T2,
        Rule::Q,
    ];
    /// The six rules tabulated in convergence studies (Q excluded).
    pub const SIX: [Rule; 6] = [Rule::L, Rule::R, Rule::M, Rule::T, Rule::S, Rule::T2];

    pub fn name(self) -> &'static str {
        match self {
            Rule::L => "L",
            Rule::R => "R",
            Rule::M => "M",
            Rule::T => "T",
            Rule::S => "S",
            Rule::T2 => "T2",
            Rule::Q => "Q",
        }
    }

    pub fn meta(self) -> RuleSpec {
        rule_meta(self)
    }

    /// Samples this rule reads on one panel, including through the rules it
    /// is built from.
    pub fn needs(self) -> Needs {
        let n = Needs::default();
        match self {
            Rule::L => Needs { left: true, ..n },
            Rule::R => Needs { right: true, ..n },
            Rule::M => Needs { mid: true, ..n },
            Rule::T => Needs {
                left: true,
                right: true,
                ..n
            },
            Rule::T2 => Needs {
                mid: true,
                curvature: true,
                ..n
            },
            Rule::S => Rule::M.needs().union(Rule::T.needs()),
            Rule::Q => Rule::T2.needs().union(Rule::S.needs()),
        }
    }

    /// Parses a comma separated list such as `L,R,M`.
    pub fn parse_list(text: &str) -> Result<Vec<Rule>, Error> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let r: Rule = part.parse()?;
            if !out.contains(&r) {
                out.push(r);
            }
        }
        if out.is_empty() {
            return Err(Error::UnknownRule(text.to_string()));
        }
        Ok(out)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorSign {
    /// The rule underestimates when the relevant derivative is positive.
    Positive,
    Negative,
    /// Sign fixed only under the weaker difference assumption (rule Q).
    Conditional,
}

/// Fixed metadata of a simple rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RuleSpec {
    pub rule: Rule,
    /// Degree of precision carried in the error expansion.
    pub degree: u32,
    /// Degree as commonly tabulated for the rule; differs from the probed
    /// degree for R and Q.
    pub listed_degree: u32,
    pub error_sign: ErrorSign,
    /// `d` in `E = ±(b-a)^(m+2) f^(m+1)(xi) / d`; `None` for Q, whose error
    /// is a difference of two derivative values.
    pub error_denominator: Option<u32>,
    pub derivative_order_needed: u32,
}

pub fn rule_meta(rule: Rule) -> RuleSpec {
    use ErrorSign::*;
    let (degree, listed_degree, error_sign, error_denominator, derivative_order_needed) = match rule
    {
        Rule::L => (0, 0, Positive, Some(2), 0),
        Rule::R => (0, 1, Negative, Some(2), 0),
        Rule::M => (1, 1, Positive, Some(24), 0),
        Rule::T => (1, 1, Negative, Some(12), 0),
        Rule::S => (3, 3, Negative, Some(2880), 0),
        Rule::T2 => (3, 3, Positive, Some(1920), 2),
        Rule::Q => (3, 3, Conditional, None, 2),
    };
    RuleSpec {
        rule,
        degree,
        listed_degree,
        error_sign,
        error_denominator,
        derivative_order_needed,
    }
}

/// Which samples of one panel are read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Needs {
    pub left: bool,
    pub right: bool,
    pub mid: bool,
    /// `f''` at the midpoint.
    pub curvature: bool,
}

impl Needs {
    pub fn union(self, other: Needs) -> Needs {
        Needs {
            left: self.left || other.left,
            right: self.right || other.right,
            mid: self.mid || other.mid,
            curvature: self.curvature || other.curvature,
        }
    }

    pub fn of(rules: &[Rule]) -> Needs {
        rules
            .iter()
            .fold(Needs::default(), |acc, r| acc.union(r.needs()))
    }
}

/// Samples of `f` on one panel `[a, a + width]`.
#[derive(Clone, Debug)]
pub struct Samples<V> {
    pub width: V,
    pub left: Option<V>,
    pub right: Option<V>,
    pub mid: Option<V>,
    pub curvature: Option<V>,
}

fn take<V: Clone>(v: &Option<V>, what: &str) -> V {
    v.clone()
        .unwrap_or_else(|| panic!("panel sample `{what}` was not provided"))
}

/// Evaluates `rules` on one panel. S and Q are formed as weighted means of
/// the M/T and T2/S values, each computed once.
///
/// Panics if `samples` lacks a value the requested rules need.
pub fn panel_values<V: Scalar>(rules: &[Rule], samples: &Samples<V>) -> RuleMap<V> {
    let w = &samples.width;
    let mut memo: RuleMap<V> = RuleMap::new();
    fn get<V: Scalar>(rule: Rule, s: &Samples<V>, w: &V, memo: &mut RuleMap<V>) -> V {
        if let Some(v) = memo.get(&rule) {
            return v.clone();
        }
        let v = match rule {
            Rule::L => w.clone() * take(&s.left, "left"),
            Rule::R => w.clone() * take(&s.right, "right"),
            Rule::M => w.clone() * take(&s.mid, "mid"),
            Rule::T => w.clone() * (take(&s.left, "left") + take(&s.right, "right")) / w.integer(2),
            Rule::T2 => {
                let m = get(Rule::M, s, w, memo);
                let cube = w.clone() * w.clone() * w.clone();
                m + cube * take(&s.curvature, "curvature") / w.integer(24)
            }
            Rule::S => {
                let m = get(Rule::M, s, w, memo);
                let t = get(Rule::T, s, w, memo);
                associate_value(&m, &t, CompanionPair::MT.weights())
            }
            Rule::Q => {
                let t2 = get(Rule::T2, s, w, memo);
                let simpson = get(Rule::S, s, w, memo);
                associate_value(&t2, &simpson, CompanionPair::T2S.weights())
            }
        };
        memo.insert(rule, v.clone());
        v
    }
    let mut out = RuleMap::new();
    for &r in rules {
        out.insert(r, get(r, samples, w, &mut memo));
    }
    out
}

/// Samples `f` on `iv` according to `needs`.
pub fn sample_panel(
    f: &Integrand,
    iv: &Interval,
    needs: Needs,
    prec: Precision,
) -> Result<Samples<Real>, Error> {
    let mid = iv.midpoint().to_precision(prec);
    Ok(Samples {
        width: iv.width().to_precision(prec),
        left: needs.left.then(|| f.eval(iv.a(), prec)).transpose()?,
        right: needs.right.then(|| f.eval(iv.b(), prec)).transpose()?,
        mid: needs.mid.then(|| f.eval(&mid, prec)).transpose()?,
        curvature: needs
            .curvature
            .then(|| f.eval_derivative(2, &mid, prec))
            .transpose()?,
    })
}

/// Value of a single (non-composite) rule on `iv`.
pub fn eval_simple(
    rule: Rule,
    f: &Integrand,
    iv: &Interval,
    prec: Precision,
) -> Result<Real, Error> {
    let samples = sample_panel(f, iv, rule.needs(), prec)?;
    Ok(panel_values(&[rule], &samples)
        .remove(&rule)
        .expect("requested rule is present"))
}

/// All of `rules` on `iv`, sharing node evaluations.
pub fn eval_simple_all(
    rules: &[Rule],
    f: &Integrand,
    iv: &Interval,
    prec: Precision,
) -> Result<RuleMap<Real>, Error> {
    let samples = sample_panel(f, iv, Needs::of(rules), prec)?;
    Ok(panel_values(rules, &samples))
}
