use thiserror::Error;

use crate::expr::{DomainError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Domain(#[from] DomainError),

    /// A domain error hit while sampling one panel of a composite rule.
    #[error("panel {panel}, node x = {node}: {source}")]
    Panel {
        panel: usize,
        node: String,
        #[source]
        source: DomainError,
    },

    #[error("precision must be between 2 and 1048576 bits, got {0}")]
    InvalidPrecision(u32),

    #[error("invalid decimal number `{0}`")]
    InvalidNumber(String),

    #[error("interval must satisfy a < b, got [{a}, {b}]")]
    InvalidInterval { a: String, b: String },

    #[error("panel count must be at least 1")]
    InvalidPanels,

    #[error("unknown integrand `{0}`")]
    UnknownIntegrand(String),

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("{0} and {1} are not companion rules")]
    NotCompanions(String, String),

    #[error("expression must not depend on x: {0}")]
    NotConstant(String),

    #[error("convergence order undefined: an error is exactly zero")]
    UndefinedOrder,

    #[error("malformed table: {0}")]
    Table(String),
}
