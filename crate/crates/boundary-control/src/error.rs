use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "truncation too coarse for flux {flux_quanta:.6}: unitarity deviation {deviation:.3e} \
         exceeds 0.1; increase the basis half-width N"
    )]
    TruncationTooCoarse { deviation: f64, flux_quanta: f64 },

    #[error("propagator refinement did not converge: k = {k} reached with gap {gap:.3e}")]
    NonConvergence { k: u64, gap: f64 },

    #[error(
        "distance bound violated: measured {measured:.6e} exceeds bound {bound:.6e} + 1e-8 \
         (propagator defect)"
    )]
    CertificationFailure { bound: f64, measured: f64 },

    #[error("requested deviations unattainable: {0}")]
    Unattainable(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
