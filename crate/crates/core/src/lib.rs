//! Quadrature rules, their companion brackets and convergence analysis,
//! evaluated in arbitrary-precision binary floating point.

pub mod analysis;
pub mod associate;
pub mod composite;
pub mod error;
pub mod expr;
pub mod integrand;
pub mod real;
pub mod rules;

pub use analysis::{
    convergence_table, degree_probe, digits_correct, observed_order, order_string, signed_error,
    ConvergenceTable, DegreeProbe, Provenance, Reference, SignFlag, TableRow,
};
pub use associate::{
    check_assumption_a, derive_weights, AssociateWeights, Bracket, CompanionBracket, CompanionPair,
    Verdict,
};
pub use composite::{composite_eval, composite_table_values, CompositeRequest};
pub use error::Error;
pub use expr::{parse, DomainError, Expr, ParseError};
pub use integrand::{Builtin, Integrand, Interval};
pub use real::{Precision, Real};
pub use rules::{eval_simple, ErrorSign, Rule, RuleMap, RuleSpec};
