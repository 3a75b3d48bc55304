//! `quad` command line: argument grammar, dispatch and output formatting.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quad_core::analysis::{assumption_flags, table_io, ConvergenceTable, Provenance};
use quad_core::associate::{bracket, check_assumption_a, DEFAULT_SAMPLES};
use quad_core::expr::parse;
use quad_core::{
    composite_table_values, convergence_table, degree_probe, digits_correct, signed_error, Builtin,
    CompanionBracket, CompanionPair, Error, Integrand, Precision, Real, Reference, Rule,
};
use serde_json::Value;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "quad",
    version,
    about = "Quadrature rules, companion brackets and convergence tables"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Working precision in bits.
    #[arg(long, global = true, env = "QUAD_PREC", default_value_t = 53, value_parser = parse_precision)]
    prec: u32,

    /// Output format.
    #[arg(long, global = true, env = "QUAD_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Composite value of one rule.
    Integrate {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        #[arg(long, default_value_t = 1, value_parser = parse_panel_count)]
        panels: usize,
    },
    /// Bracket from a companion pair and its associate value.
    Bracket {
        #[command(flatten)]
        source: Source,
        /// Companion pair, e.g. `L,R`, `M,T` or `T2,S`.
        #[arg(long, value_parser = parse_pair)]
        pair: CompanionPair,
        #[arg(long, default_value_t = 1, value_parser = parse_panel_count)]
        panels: usize,
    },
    /// Signed errors, order strings and sign checks over panel counts.
    Table {
        #[command(flatten)]
        source: Source,
        /// Comma-separated rules.
        #[arg(long, default_value = "L,R,M,T,S,T2,Q", value_parser = parse_rules)]
        rules: RuleList,
        /// Comma list or doubling sweep `2^k..2^m`.
        #[arg(long, default_value = "2^0..2^10", value_parser = parse_panels)]
        panels: PanelList,
    },
    /// Degree of precision by exact rational probing on monomials.
    Degree {
        /// Rule to probe; all rules when omitted.
        #[arg(long, value_parser = parse_rule)]
        rule: Option<Rule>,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=64))]
        max: u32,
    },
    /// Composite value of a built-in example against pi.
    Pi {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        example: u8,
        #[arg(long, default_value = "S", value_parser = parse_rule)]
        rule: Rule,
        #[arg(long, default_value_t = 1024, value_parser = parse_panel_count)]
        panels: usize,
    },
}

#[derive(Debug, Args)]
struct Source {
    /// Built-in name (sin2, asin6, atan2) or an expression in x.
    #[arg(long)]
    integrand: String,
    /// Lower limit; replaces a built-in interval only together with --b.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Upper limit.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Closed-form value of the integral, an expression without x.
    #[arg(long)]
    reference: Option<String>,
}

#[derive(Clone, Debug)]
struct RuleList(Vec<Rule>);

#[derive(Clone, Debug)]
pub struct PanelList(pub Vec<usize>);

fn parse_precision(s: &str) -> Result<u32, String> {
    let bits: u32 = s.parse().map_err(|_| format!("not a bit count: `{s}`"))?;
    Precision::new(bits)
        .map(|p| p.bits())
        .map_err(|e| e.to_string())
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rules(s: &str) -> Result<RuleList, String> {
    Rule::parse_list(s).map(RuleList).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<CompanionPair, String> {
    let rules = Rule::parse_list(s).map_err(|e| e.to_string())?;
    match rules.as_slice() {
        [x, y] => CompanionPair::new(*x, *y).map_err(|e| e.to_string()),
        _ => Err(format!("expected two rules, got `{s}`")),
    }
}

fn parse_panel_count(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("panel count must be a positive integer, got `{s}`")),
    }
}

fn parse_power(s: &str) -> Result<u32, String> {
    s.trim()
        .strip_prefix("2^")
        .and_then(|k| k.parse::<u32>().ok())
        .filter(|k| *k < usize::BITS - 1)
        .ok_or_else(|| format!("expected 2^k, got `{s}`"))
}

/// `1,2,4` or `2^k..2^m`.
pub fn parse_panels(s: &str) -> Result<PanelList, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (parse_power(lo)?, parse_power(hi)?);
        if lo > hi {
            return Err(format!("empty sweep `{s}`"));
        }
        return Ok(PanelList((lo..=hi).map(|k| 1usize << k).collect()));
    }
    let list = s
        .split(',')
        .map(parse_panel_count)
        .collect::<Result<Vec<_>, _>>()?;
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!(
            "panel counts must be strictly ascending, got `{s}`"
        ));
    }
    Ok(PanelList(list))
}

fn is_usage(e: &Error) -> bool {
    !matches!(
        e,
        Error::Domain(_) | Error::Panel { .. } | Error::UndefinedOrder | Error::Table(_)
    )
}

impl Source {
    fn resolve(&self) -> Result<Integrand, Error> {
        let builtin = self.integrand.parse::<Builtin>().ok();
        let f = match (builtin, &self.a, &self.b) {
            (Some(b), Some(lo), Some(hi)) => {
                Integrand::new(b.integrand().expr().clone(), parse(lo)?, parse(hi)?)?
            }
            (Some(b), _, _) => b.integrand(),
            (None, Some(lo), Some(hi)) => Integrand::parse(&self.integrand, lo, hi)?,
            (None, _, _) if looks_like_name(&self.integrand) => {
                return Err(Error::UnknownIntegrand(self.integrand.clone()))
            }
            (None, _, _) => {
                // Surface syntax errors before complaining about the limits.
                parse(&self.integrand)?;
                return Err(Error::UnknownIntegrand(format!(
                    "{} (expressions need both --a and --b)",
                    self.integrand
                )));
            }
        };
        match &self.reference {
            Some(r) => f.with_reference(parse(r)?),
            None => Ok(f),
        }
    }
}

fn looks_like_name(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_alphanumeric()) && parse(s).is_err()
}

fn value_text(v: &Real) -> String {
    v.to_display_string()
}

fn error_text(v: &Real) -> String {
    let p = v.precision();
    if p.is_double() {
        v.to_scientific(None)
    } else {
        v.to_scientific(Some(p.decimal_digits().saturating_sub(2).max(1)))
    }
}

fn provenance_text(r: &Reference) -> String {
    match r.provenance {
        Provenance::ClosedForm => "closed form".into(),
        Provenance::Oracle { precision, panels } => {
            format!(
                "extrapolated Simpson, {panels} and {} panels at {precision} bits",
                2 * panels
            )
        }
    }
}

/// Ordered key/value output rendered in any of the three formats.
struct Record(Vec<(&'static str, String)>);

impl Record {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.0.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let written = w
                    .write_record(self.0.iter().map(|(k, _)| *k))
                    .and_then(|_| w.write_record(self.0.iter().map(|(_, v)| v.as_str())));
                written.expect("writing to memory");
                String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
            }
            Format::Json => {
                let body: Vec<String> = self
                    .0
                    .iter()
                    .map(|(k, v)| format!("{}:{}", Value::from(*k), Value::from(v.as_str())))
                    .collect();
                format!("{{{}}}\n", body.join(","))
            }
        }
    }
}

fn reference_for(f: &Integrand, prec: Precision, err: &mut dyn Write) -> Option<Reference> {
    match Reference::for_integrand(f, prec) {
        Ok(r) => Some(r),
        Err(e) => {
            let _ = writeln!(err, "quad: no reference value: {e}");
            None
        }
    }
}

fn integrate(
    source: &Source,
    rule: Rule,
    panels: usize,
    prec: Precision,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Error> {
    let f = source.resolve()?;
    let iv = f.interval(prec)?;
    let value = composite_table_values(&f, &iv, &[rule], panels, prec)?
        .remove(&rule)
        .expect("rule present");
    let mut rec = vec![
        ("integrand", f.to_string()),
        ("rule", rule.to_string()),
        ("panels", panels.to_string()),
        ("precision", prec.to_string()),
        ("value", value_text(&value)),
    ];
    if let Some(r) = reference_for(&f, prec, err) {
        rec.push(("reference", value_text(&r.value.to_precision(prec))));
        rec.push(("reference_source", provenance_text(&r)));
        rec.push(("error", error_text(&signed_error(&value, &r))));
    }
    write_out(out, &Record(rec).render(format))
}

#[allow(clippy::too_many_arguments)]
fn bracket_cmd(
    source: &Source,
    pair: CompanionPair,
    panels: usize,
    prec: Precision,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Error> {
    let f = source.resolve()?;
    let iv = f.interval(prec)?;
    let rules = [pair.positive(), pair.negative()];
    let values = composite_table_values(&f, &iv, &rules, panels, prec)?;
    let verdict = check_assumption_a(&f, pair.derivative_order(), &iv, DEFAULT_SAMPLES, prec)
        .unwrap_or(quad_core::Verdict::Unknown);
    let (x, y) = (
        values[&pair.positive()].clone(),
        values[&pair.negative()].clone(),
    );
    let cb = CompanionBracket::new(pair, x.clone(), y.clone(), verdict);
    let br = bracket(&x, &y);
    let mut rec = vec![
        ("integrand", f.to_string()),
        ("pair", pair.label()),
        ("panels", panels.to_string()),
        ("precision", prec.to_string()),
        (pair.positive().name(), value_text(&x)),
        (pair.negative().name(), value_text(&y)),
        (
            "bracket",
            format!("[{}, {}]", value_text(br.lo()), value_text(br.hi())),
        ),
        ("width", error_text(&br.width())),
    ];
    if let Some(assoc) = pair.associate() {
        rec.push(("associate", assoc.to_string()));
    }
    rec.push(("associate_value", value_text(&cb.associate_value)));
    rec.push((
        "assumption",
        format!(
            "{} (derivative of order {})",
            cb.verdict.code(),
            pair.derivative_order()
        ),
    ));
    rec.push(("verified", cb.verified().to_string()));
    if let Some(r) = reference_for(&f, prec, err) {
        rec.push(("reference", value_text(&r.value.to_precision(prec))));
        rec.push((
            "contains reference",
            br.contains(&r.value.to_precision(prec)).to_string(),
        ));
    }
    write_out(out, &Record(rec).render(format))
}

fn table(
    source: &Source,
    rules: &[Rule],
    panels: &[usize],
    prec: Precision,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Error> {
    let f = source.resolve()?;
    let reference = Reference::for_integrand(&f, prec)?;
    let table = convergence_table(&f, rules, panels, &reference, prec)?;
    for (n, msg) in &table.failures {
        writeln!(err, "quad: n={n}: {msg}").map_err(io_error)?;
    }
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            table_io::write_csv(&table, &mut buf)?;
            out.write_all(&buf).map_err(io_error)?;
        }
        Format::Json => {
            let text = table_io::to_json(&table).to_string();
            writeln!(out, "{text}").map_err(io_error)?;
        }
        Format::Text => {
            let flags = assumption_flags(&f, rules, prec)?;
            writeln!(out, "integrand: {f}").map_err(io_error)?;
            writeln!(out, "precision: {prec}").map_err(io_error)?;
            writeln!(
                out,
                "reference: {} ({})",
                value_text(&reference.value.to_precision(prec)),
                provenance_text(&reference)
            )
            .map_err(io_error)?;
            for (pair, verdict) in &flags {
                writeln!(out, "assumption {}: {verdict}", pair.label()).map_err(io_error)?;
            }
            write_out(out, &text_table(&table)?)?;
        }
    }
    if table.rows.is_empty() {
        return Err(Error::Table("no panel count could be evaluated".into()));
    }
    Ok(())
}

/// Errors listed by position in the order string.
fn text_table(table: &ConvergenceTable) -> Result<String, Error> {
    let mut header = vec!["n".to_string(), "order".to_string()];
    header.extend((1..=table.rules.len()).map(|i| format!("err{i}")));
    let mut rows = vec![header];
    for row in &table.rows {
        let mut line = vec![row.n.to_string(), row.order.clone()];
        for rule in row.order_rules()? {
            line.push(error_text(&row.errors[&rule]));
        }
        rows.push(line);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}

fn degree(rule: Option<Rule>, max: u32, format: Format, out: &mut dyn Write) -> Result<(), Error> {
    let rules: Vec<Rule> = rule.map(|r| vec![r]).unwrap_or_else(|| Rule::ALL.to_vec());
    let mut text = String::new();
    for rule in rules {
        let probe = degree_probe(rule, max);
        let degree = probe
            .degree
            .map(|d| d.to_string())
            .unwrap_or_else(|| "none".into());
        let mut rec = vec![
            ("rule", rule.to_string()),
            ("degree", degree),
            ("at_least", probe.at_least.to_string()),
            ("listed_degree", rule.meta().listed_degree.to_string()),
        ];
        if let Some(note) = probe.discrepancy() {
            rec.push(("note", note));
        }
        text.push_str(&Record(rec).render(format));
    }
    write_out(out, &text)
}

fn pi_cmd(
    example: u8,
    rule: Rule,
    panels: usize,
    prec: Precision,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Error> {
    let b = Builtin::from_example(example)
        .ok_or_else(|| Error::UnknownIntegrand(example.to_string()))?;
    let f = b.integrand();
    let iv = f.interval(prec)?;
    let value = composite_table_values(&f, &iv, &[rule], panels, prec)?
        .remove(&rule)
        .expect("rule present");
    let reference = Reference::for_integrand(&f, prec)?;
    let rec = vec![
        ("example", example.to_string()),
        ("integrand", b.name().to_string()),
        ("rule", rule.to_string()),
        ("panels", panels.to_string()),
        ("precision", prec.to_string()),
        ("value", value_text(&value)),
        ("pi", value_text(&reference.value.to_precision(prec))),
        ("error", error_text(&signed_error(&value, &reference))),
        (
            "digits_correct",
            digits_correct(&value, &reference).to_string(),
        ),
    ];
    write_out(out, &Record(rec).render(format))
}

fn io_error(e: std::io::Error) -> Error {
    Error::Table(format!("write failed: {e}"))
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Error> {
    out.write_all(text.as_bytes()).map_err(io_error)
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let prec = Precision::new(cli.prec).expect("validated by the parser");
    let result = match &cli.command {
        Command::Integrate {
            source,
            rule,
            panels,
        } => integrate(source, *rule, *panels, prec, cli.format, out, err),
        Command::Bracket {
            source,
            pair,
            panels,
        } => bracket_cmd(source, *pair, *panels, prec, cli.format, out, err),
        Command::Table {
            source,
            rules,
            panels,
        } => table(source, &rules.0, &panels.0, prec, cli.format, out, err),
        Command::Degree { rule, max } => degree(*rule, *max, cli.format, out),
        Command::Pi {
            example,
            rule,
            panels,
        } => pi_cmd(*example, *rule, *panels, prec, cli.format, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "quad: {e}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_NUMERIC
            }
        }
    }
}
