use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the plate toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("inadmissible density at node ({i}, {k}): value {value} outside [{alpha}, {beta}]")]
    DensityOutOfBounds {
        i: usize,
        k: usize,
        value: f64,
        alpha: f64,
        beta: f64,
    },

    #[error("inadmissible density: mass {mass} differs from |Omega| = {target}")]
    DensityMass { mass: f64, target: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(&'static str),

    #[error("eigensolver did not converge: {0}")]
    EigenNonConvergence(String),

    #[error("field must be strictly positive on interior nodes; node ({i}, {k}) has value {value}")]
    NonPositiveField { i: usize, k: usize, value: f64 },

    #[error("zero vector has no Rayleigh quotient")]
    ZeroVector,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-monotone step at iteration {iter}: lambda went from {previous} to {next}")]
    MonotonicityViolation { iter: usize, previous: f64, next: f64 },

    #[error("mirror gaps have mixed signs (max {max_gap:e}, min {min_gap:e}); no symmetry alternative applies")]
    MixedSymmetry { max_gap: f64, min_gap: f64 },

    #[error("midline slope {slope:e} at y = {y} inconsistent with symmetry class {class}")]
    SlopeInconsistent { y: f64, slope: f64, class: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EigenNonConvergence(_)
            | Error::NotPositiveDefinite(_)
            | Error::NonFinite(_)
            | Error::MonotonicityViolation { .. }
            | Error::NonPositiveField { .. }
            | Error::MixedSymmetry { .. }
            | Error::SlopeInconsistent { .. } => 3,
            _ => 2,
        }
    }
}
