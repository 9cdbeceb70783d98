use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("argument out of domain: {0}")]
    DomainError(String),

    #[error("bad coupling-function support: {0}")]
    BadSupport(String),

    #[error("operation not supported for {0} coupling")]
    ShapeUnsupported(&'static str),

    #[error("invalid pulse schedule: {0}")]
    InvalidSchedule(String),

    #[error("oracle dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error(
        "Fock truncation overflow at t = {t}: top-level population {leak:e} exceeds {threshold:e}; raise fock_dim"
    )]
    TruncationOverflow { t: f64, leak: f64, threshold: f64 },

    #[error("time grids do not match: {0}")]
    GridMismatch(String),

    #[error("bracket [{lo}, {hi}] does not enclose a maximum")]
    NoBracket { lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}
