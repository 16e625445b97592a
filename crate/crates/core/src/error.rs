use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} row {row} does not sum to 1 (residual {residual:+.3e})")]
    ProbabilitySum {
        what: String,
        row: usize,
        residual: f64,
    },

    #[error("model failed validation:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("{name}: argument {value} outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error(
        "{0} is not defined for the joint error type; use the MAC as a point-to-point channel"
    )]
    JointErrorType(&'static str),

    #[error(
        "threshold equation did not converge after {iterations} iterations \
         (bracket [{lo:e}, {hi:e}], residual {residual:e})"
    )]
    NonConvergence {
        iterations: usize,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    /// Input problems (bad files, bad arguments) as opposed to numerical failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NonConvergence { .. } | Error::Domain { .. })
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
