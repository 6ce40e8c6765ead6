use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error("domain too small: need r_max >= {needed:.4}, have {have:.4}")]
    DomainTooSmall { needed: f64, have: f64 },
    #[error("time step {dt} exceeds cfl limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("solver aborted at t = {t}: {reason}")]
    SolverAbort { t: f64, reason: String },
    #[error("missing diagnostic channel `{0}`")]
    MissingChannel(&'static str),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, HypError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> HypError {
    HypError::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
