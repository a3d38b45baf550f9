use thiserror::Error;

/// Errors raised by the library. The CLI maps [`Error::Usage`] to exit code 2
/// and every other variant to exit code 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("physical validity error: event {event}, clock `{clock}`: {message}")]
    PhysicalValidity {
        event: usize,
        clock: String,
        message: String,
    },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("no recurrence below horizon {horizon} s (best candidate t = {best_time} s at distance {best_distance})")]
    NotFound {
        horizon: f64,
        best_time: f64,
        best_distance: f64,
    },

    #[error("aliasing risk: {0}")]
    AliasingRisk(String),
}

impl Error {
    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Conflict(_) => "conflict",
            Error::Validation(_) => "validation",
            Error::Unsupported(_) => "unsupported",
            Error::Domain(_) => "domain",
            Error::Usage(_) => "usage",
            Error::PhysicalValidity { .. } => "physical_validity",
            Error::Resolution(_) => "resolution",
            Error::NotFound { .. } => "not_found",
            Error::AliasingRisk(_) => "aliasing_risk",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
