use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator, dataset and estimator layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("integrator step size underflow at t = {t} ns (step {step:e} ns)")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("density matrix invariant violated at t = {t} ns: {what}")]
    InvariantViolation { t: f64, what: String },

    #[error("integration failed at nu_d = {nu_d} GHz: {source}")]
    Protocol {
        nu_d: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate column {column}: max equals min")]
    DegenerateColumn { column: usize },

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("malformed map file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse { path: path.into(), message: message.to_string() }
    }
}
