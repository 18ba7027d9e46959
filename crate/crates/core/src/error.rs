//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by validation, estimation and ingestion routines.
///
/// Hot-path stepping functions do not return errors; their parameter
/// domains are enforced by [`crate::models::ModelParams::validate`] and
/// friends before a simulation starts.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("invalid parameter `{name}`: {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// A fit or inversion has no solution in the admissible domain.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Not enough data points for the requested estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Every event in an ensemble was censored; no escape time observed.
    #[error("degenerate ensemble: all {0} events censored before escape")]
    DegenerateEnsemble(usize),

    /// Input series is degenerate (constant, all-zero, empty, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Two binned distributions do not share bin edges.
    #[error("bin edges mismatch: {0}")]
    EdgeMismatch(String),

    /// A text table failed to parse.
    #[error("parse error at line {line}{}: {msg}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, constraint: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            constraint,
            value,
        }
    }
}
