//! Convergence tables and the measurements around them.

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use rug::Rational;
use serde_json::{Map, Value};

use crate::associate::{check_assumption_a, CompanionPair, Verdict, DEFAULT_SAMPLES};
use crate::composite::composite_table_values;
use crate::error::Error;
use crate::integrand::Integrand;
use crate::real::{Precision, Real};
use crate::rules::{panel_values, Rule, RuleMap, Samples};

/// Guard bits carried by references relative to the working precision.
pub const REFERENCE_GUARD_BITS: u32 = 32;
/// Panel count of the coarse half of the fallback oracle.
pub const ORACLE_PANELS: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    /// Richardson-extrapolated composite Simpson on `panels` and `2 panels`.
    Oracle {
        precision: Precision,
        panels: usize,
    },
}

/// Value of the integral used to measure errors.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub value: Real,
    pub provenance: Provenance,
}

impl Reference {
    pub fn closed_form(value: Real) -> Self {
        Reference {
            value,
            provenance: Provenance::ClosedForm,
        }
    }

    /// The integrand's closed form at `prec` plus guard bits, or the
    /// extrapolated Simpson oracle when it has none.
    pub fn for_integrand(f: &Integrand, prec: Precision) -> Result<Self, Error> {
        let prec = prec.with_guard(REFERENCE_GUARD_BITS);
        if let Some(value) = f.reference(prec) {
            return Ok(Reference::closed_form(value?));
        }
        let iv = f.interval(prec)?;
        let coarse = composite_table_values(f, &iv, &[Rule::S], ORACLE_PANELS, prec)?;
        let fine = composite_table_values(f, &iv, &[Rule::S], 2 * ORACLE_PANELS, prec)?;
        let (coarse, fine) = (&coarse[&Rule::S], &fine[&Rule::S]);
        let value = fine + &((fine - coarse) / Real::from_i64(15, prec));
        Ok(Reference {
            value,
            provenance: Provenance::Oracle {
                precision: prec,
                panels: ORACLE_PANELS,
            },
        })
    }
}

/// `I(f) - value` with the reference rounded to the value's precision;
/// positive when the rule underestimates.
pub fn signed_error(value: &Real, reference: &Reference) -> Real {
    reference.value.to_precision(value.precision()) - value.clone()
}

/// Rule names concatenated by ascending value, ties in canonical order.
///
/// Values within `2^-(p-8)` of each other, relative to the larger, count as
/// tied: exactly equal rules (all of them on Example 1, `L = R = T` on a
/// symmetric integrand) otherwise get ordered by rounding noise.
pub fn order_string(values: &RuleMap<Real>) -> String {
    let mut entries: Vec<(Rule, &Real)> = values.iter().map(|(r, v)| (*r, v)).collect();
    entries.sort_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = String::new();
    let mut i = 0;
    while i < entries.len() {
        let anchor = entries[i].1;
        let mut j = i + 1;
        while j < entries.len() && tied(anchor, entries[j].1) {
            j += 1;
        }
        let mut cluster: Vec<Rule> = entries[i..j].iter().map(|e| e.0).collect();
        cluster.sort();
        out.extend(cluster.iter().map(|r| r.name()));
        i = j;
    }
    out
}

fn tied(a: &Real, b: &Real) -> bool {
    if a == b {
        return true;
    }
    let prec = a.precision().bits().max(b.precision().bits());
    let p = Precision::new(prec).unwrap_or_default();
    let scale = a.abs().max(&b.abs()).clone();
    let tol = scale / Real::from_i64(2, p).powi(prec as i32 - 8);
    (a - b).abs() <= tol
}

/// Splits an order string such as `LMT2STR` back into rules.
pub fn parse_order(order: &str) -> Result<Vec<Rule>, Error> {
    let mut out = Vec::new();
    let mut rest = order;
    while !rest.is_empty() {
        let len = if rest.starts_with("T2") {
            2
        } else {
            rest.chars().next().map_or(1, char::len_utf8)
        };
        out.push(rest[..len].parse()?);
        rest = &rest[len..];
    }
    Ok(out)
}

/// `log2(|err_n| / |err_2n|)`.
pub fn observed_order(err_n: &Real, err_2n: &Real) -> Result<f64, Error> {
    if err_n.is_zero() || err_2n.is_zero() {
        return Err(Error::UndefinedOrder);
    }
    Ok((err_n.abs() / err_2n.abs()).log2().to_f64())
}

/// Sign-check outcome as stored in a table row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignFlag {
    Positive,
    Negative,
    Zero,
    Change,
    Unknown,
}

impl SignFlag {
    pub fn code(self) -> &'static str {
        match self {
            SignFlag::Positive => "A+",
            SignFlag::Negative => "A-",
            SignFlag::Zero => "A0",
            SignFlag::Change => "A!",
            SignFlag::Unknown => "A?",
        }
    }

    pub fn from_code(code: &str) -> Option<SignFlag> {
        [
            SignFlag::Positive,
            SignFlag::Negative,
            SignFlag::Zero,
            SignFlag::Change,
            SignFlag::Unknown,
        ]
        .into_iter()
        .find(|f| f.code() == code)
    }
}

impl From<&Verdict> for SignFlag {
    fn from(v: &Verdict) -> Self {
        match v {
            Verdict::AllPositive => SignFlag::Positive,
            Verdict::AllNegative => SignFlag::Negative,
            Verdict::IdenticallyZero => SignFlag::Zero,
            Verdict::SignChange { .. } => SignFlag::Change,
            Verdict::Unknown => SignFlag::Unknown,
        }
    }
}

/// One line of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub order: String,
    pub assumptions: BTreeMap<CompanionPair, SignFlag>,
    pub errors: RuleMap<Real>,
}

impl TableRow {
    /// `LR=A+;MT=A+;T2S=A-`.
    pub fn assumptions_field(&self) -> String {
        self.assumptions
            .iter()
            .map(|(p, f)| format!("{}={}", p.label(), f.code()))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Rules in the order of the order string.
    pub fn order_rules(&self) -> Result<Vec<Rule>, Error> {
        parse_order(&self.order)
    }

    fn parse_assumptions(text: &str) -> Result<BTreeMap<CompanionPair, SignFlag>, Error> {
        let mut out = BTreeMap::new();
        for item in text.split(';').filter(|s| !s.is_empty()) {
            let (label, code) = item
                .split_once('=')
                .ok_or_else(|| Error::Table(format!("bad assumption entry `{item}`")))?;
            let pair = CompanionPair::from_label(label)
                .ok_or_else(|| Error::Table(format!("unknown pair `{label}`")))?;
            let flag = SignFlag::from_code(code)
                .ok_or_else(|| Error::Table(format!("unknown verdict `{code}`")))?;
            out.insert(pair, flag);
        }
        Ok(out)
    }
}

/// Rows that evaluated, plus a diagnostic for each panel count that did not.
#[derive(Clone, Debug, Default)]
pub struct ConvergenceTable {
    pub rules: Vec<Rule>,
    pub rows: Vec<TableRow>,
    pub failures: Vec<(usize, String)>,
}

/// Companion pairs whose rules are both in `rules`.
pub fn active_pairs(rules: &[Rule]) -> Vec<CompanionPair> {
    CompanionPair::ALL
        .into_iter()
        .filter(|p| rules.contains(&p.positive()) && rules.contains(&p.negative()))
        .collect()
}

/// Sign checks of `f^(m+1)` for each active companion pair on the whole
/// interval; they hold for every panel of a composite rule as well.
pub fn assumption_flags(
    f: &Integrand,
    rules: &[Rule],
    prec: Precision,
) -> Result<BTreeMap<CompanionPair, Verdict>, Error> {
    let iv = f.interval(prec)?;
    let mut out = BTreeMap::new();
    for pair in active_pairs(rules) {
        let verdict =
            match check_assumption_a(f, pair.derivative_order(), &iv, DEFAULT_SAMPLES, prec) {
                Ok(v) => v,
                Err(_) => Verdict::Unknown,
            };
        out.insert(pair, verdict);
    }
    Ok(out)
}

/// Errors of `rules` against `reference` for each panel count in `panels`.
pub fn convergence_table(
    f: &Integrand,
    rules: &[Rule],
    panels: &[usize],
    reference: &Reference,
    prec: Precision,
) -> Result<ConvergenceTable, Error> {
    let mut rules = rules.to_vec();
    rules.sort();
    rules.dedup();
    let iv = f.interval(prec)?;
    let flags: BTreeMap<CompanionPair, SignFlag> = assumption_flags(f, &rules, prec)?
        .iter()
        .map(|(p, v)| (*p, SignFlag::from(v)))
        .collect();
    let mut table = ConvergenceTable {
        rules: rules.clone(),
        ..Default::default()
    };
    for &n in panels {
        match composite_table_values(f, &iv, &rules, n, prec) {
            Ok(values) => {
                let errors = values
                    .iter()
                    .map(|(r, v)| (*r, signed_error(v, reference)))
                    .collect();
                table.rows.push(TableRow {
                    n,
                    order: order_string(&values),
                    assumptions: flags.clone(),
                    errors,
                });
            }
            Err(e) => table.failures.push((n, e.to_string())),
        }
    }
    Ok(table)
}

/// Result of probing the degree of precision of a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeProbe {
    pub rule: Rule,
    /// Largest `m` with exactness on `x^0 .. x^m`; `None` if not exact on
    /// constants.
    pub degree: Option<u32>,
    /// No failure was found up to the probe limit.
    pub at_least: bool,
}

impl DegreeProbe {
    /// Set when the probed degree differs from the commonly listed one.
    pub fn discrepancy(&self) -> Option<String> {
        let listed = self.rule.meta().listed_degree;
        match self.degree {
            Some(d) if d == listed => None,
            Some(d) => Some(format!(
                "rule {} is commonly listed with degree {listed}; exact-rational probing gives {d}",
                self.rule
            )),
            None => Some(format!("rule {} is not exact on constants", self.rule)),
        }
    }
}

impl fmt::Display for DegreeProbe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.degree, self.at_least) {
            (Some(d), false) => write!(f, "{d}"),
            (Some(d), true) => write!(f, ">= {d}"),
            (None, _) => f.write_str("none"),
        }
    }
}

fn monomial_samples(k: u32) -> Samples<Rational> {
    let half = Rational::from((1, 2));
    let pow = |base: &Rational, e: u32| -> Rational {
        (0..e).fold(Rational::from(1), |acc, _| acc * base)
    };
    let curvature = if k >= 2 {
        Rational::from(k * (k - 1)) * pow(&half, k - 2)
    } else {
        Rational::from(0)
    };
    Samples {
        width: Rational::from(1),
        left: Some(Rational::from(u32::from(k == 0))),
        right: Some(Rational::from(1)),
        mid: Some(pow(&half, k)),
        curvature: Some(curvature),
    }
}

/// Degree of precision of `rule` from exact rational evaluation on the
/// monomials `x^k`, `k <= max_k + 1`, over `[0, 1]`.
pub fn degree_probe(rule: Rule, max_k: u32) -> DegreeProbe {
    for k in 0..=max_k + 1 {
        let value = panel_values(&[rule], &monomial_samples(k))
            .remove(&rule)
            .expect("rule present");
        if value != (1, k + 1) {
            return DegreeProbe {
                rule,
                degree: k.checked_sub(1),
                at_least: false,
            };
        }
    }
    DegreeProbe {
        rule,
        degree: Some(max_k),
        at_least: true,
    }
}

/// Leading significant decimal digits shared by `value` and the reference,
/// both rounded to the number of digits `value`'s precision carries.
pub fn digits_correct(value: &Real, reference: &Reference) -> u32 {
    let digits = value
        .precision()
        .decimal_digits()
        .min(reference.value.precision().decimal_digits())
        .max(1);
    if *value == reference.value {
        return digits as u32;
    }
    let round = rug::float::Round::Nearest;
    let (vn, vd, ve) = value.decimal_parts(Some(digits), round);
    let (rn, rd, re) = reference.value.decimal_parts(Some(digits), round);
    if vn != rn || ve != re {
        return 0;
    }
    vd.bytes()
        .zip(rd.bytes())
        .take_while(|(a, b)| a == b)
        .count() as u32
}

/// CSV and JSON forms of a convergence table.
pub mod table_io {
    use super::*;

    pub fn header(rules: &[Rule]) -> Vec<String> {
        let mut h = vec![
            "n".to_string(),
            "order".to_string(),
            "assumptions".to_string(),
        ];
        h.extend(rules.iter().map(|r| format!("err_{}", r.name())));
        h
    }

    fn record(row: &TableRow, rules: &[Rule]) -> Vec<String> {
        let mut rec = vec![
            row.n.to_string(),
            row.order.clone(),
            row.assumptions_field(),
        ];
        rec.extend(rules.iter().map(|r| {
            row.errors
                .get(r)
                .map(|e| e.to_scientific(None))
                .unwrap_or_default()
        }));
        rec
    }

    pub fn write_csv<W: io::Write>(table: &ConvergenceTable, out: W) -> Result<(), Error> {
        let mut w = csv::Writer::from_writer(out);
        let io_err = |e: csv::Error| Error::Table(e.to_string());
        w.write_record(header(&table.rules)).map_err(io_err)?;
        for row in &table.rows {
            w.write_record(record(row, &table.rules)).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::Table(e.to_string()))
    }

    fn rules_from_header<'a>(fields: impl Iterator<Item = &'a str>) -> Result<Vec<Rule>, Error> {
        fields
            .map(|h| {
                h.strip_prefix("err_")
                    .ok_or_else(|| Error::Table(format!("unexpected column `{h}`")))?
                    .parse::<Rule>()
            })
            .collect()
    }

    /// Reads a table written by [`write_csv`]; errors are parsed at `prec`.
    pub fn read_csv<R: io::Read>(input: R, prec: Precision) -> Result<ConvergenceTable, Error> {
        let mut r = csv::Reader::from_reader(input);
        let bad = |e: csv::Error| Error::Table(e.to_string());
        let headers = r.headers().map_err(bad)?.clone();
        if headers.len() < 3
            || &headers[0] != "n"
            || &headers[1] != "order"
            || &headers[2] != "assumptions"
        {
            return Err(Error::Table("missing n,order,assumptions columns".into()));
        }
        let rules = rules_from_header(headers.iter().skip(3))?;
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(bad)?;
            let n = rec[0]
                .parse()
                .map_err(|_| Error::Table(format!("bad n `{}`", &rec[0])))?;
            let mut errors = RuleMap::new();
            for (i, rule) in rules.iter().enumerate() {
                errors.insert(*rule, Real::parse_decimal(&rec[3 + i], prec)?);
            }
            rows.push(TableRow {
                n,
                order: rec[1].to_string(),
                assumptions: TableRow::parse_assumptions(&rec[2])?,
                errors,
            });
        }
        Ok(ConvergenceTable {
            rules,
            rows,
            failures: Vec::new(),
        })
    }

    /// Array of objects with the same fields as the CSV columns.
    pub fn to_json(table: &ConvergenceTable) -> Value {
        let rows = table
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                obj.insert("n".into(), Value::from(row.n));
                obj.insert("order".into(), Value::from(row.order.clone()));
                obj.insert("assumptions".into(), Value::from(row.assumptions_field()));
                for rule in &table.rules {
                    if let Some(e) = row.errors.get(rule) {
                        obj.insert(
                            format!("err_{}", rule.name()),
                            Value::from(e.to_scientific(None)),
                        );
                    }
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn from_json(value: &Value, prec: Precision) -> Result<ConvergenceTable, Error> {
        let bad = |what: &str| Error::Table(what.to_string());
        let items = value.as_array().ok_or_else(|| bad("expected an array"))?;
        let mut rules: Vec<Rule> = Vec::new();
        let mut rows = Vec::new();
        for item in items {
            let obj = item.as_object().ok_or_else(|| bad("expected an object"))?;
            let n = obj
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("missing n"))? as usize;
            let order = obj
                .get("order")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("missing order"))?;
            let flags = obj
                .get("assumptions")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("missing assumptions"))?;
            let row_rules = rules_from_header(
                obj.keys()
                    .map(String::as_str)
                    .filter(|k| k.starts_with("err_")),
            )?;
            let mut errors = RuleMap::new();
            for rule in &row_rules {
                let text = obj[&format!("err_{}", rule.name())]
                    .as_str()
                    .ok_or_else(|| bad("error values must be strings"))?;
                errors.insert(*rule, Real::parse_decimal(text, prec)?);
            }
            for rule in row_rules {
                if !rules.contains(&rule) {
                    rules.push(rule);
                }
            }
            rows.push(TableRow {
                n,
                order: order.to_string(),
                assumptions: TableRow::parse_assumptions(flags)?,
                errors,
            });
        }
        rules.sort();
        Ok(ConvergenceTable {
            rules,
            rows,
            failures: Vec::new(),
        })
    }
}
