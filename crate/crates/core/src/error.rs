use thiserror::Error;

/// Errors produced by the analysis library and the batch front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The lognormal-sum fit did not reach the required accuracy.
    #[error("lognormal-sum fit failed: max CDF deviation {fit_error:.3e} (limit {limit:.3e})")]
    FitFailure { fit_error: f64, limit: f64 },

    /// Malformed configuration text or command-line value.
    #[error("parse error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },

    /// A configuration key violates its constraint.
    #[error("invalid value for `{key}`: {constraint}")]
    Validation { key: String, constraint: String },

    /// Mutually inconsistent configuration keys.
    #[error("configuration conflict: {0}")]
    Conflict(String),

    /// Numerical failure (non-finite result, failed convergence).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(String),

    /// Wraps another error with the sweep point that produced it.
    #[error("at {var} = {value}: {source}")]
    AtSweepPoint {
        var: String,
        value: f64,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn validation(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            constraint: constraint.into(),
        }
    }

    /// Innermost error, skipping sweep-point annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSweepPoint { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
