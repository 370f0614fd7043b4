use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every variant has a stable machine-readable [`Error::code`]; the CLI maps these onto
/// exit statuses and prints them verbatim, so they must not be renamed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    Capacity { what: &'static str, needed: u128, cap: u128 },

    #[error("truncation cannot be certified path-complete: {0}")]
    TruncationInsufficient(String),

    #[error("empty estimation window [{lo}, {hi}]")]
    EmptyWindow { lo: usize, hi: usize },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("sequence does not drift to the zero measure: {0}")]
    NotDrifting(String),

    #[error("cylinder masses do not converge: {0}")]
    NonConvergent(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("sampling exhausted: {0}")]
    SamplingExhausted(String),

    #[error("no connecting word from {from} to {to}")]
    ConnectorNotFound { from: u64, to: u64 },

    #[error("unknown symbol {0}")]
    UnknownSymbol(u64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Schema { .. } => "SCHEMA",
            Error::Validation { .. } => "VALIDATION",
            Error::Capacity { .. } => "CAPACITY",
            Error::TruncationInsufficient(_) => "TRUNCATION_INSUFFICIENT",
            Error::EmptyWindow { .. } => "EMPTY_WINDOW",
            Error::NotStronglyConnected => "NOT_STRONGLY_CONNECTED",
            Error::NotDrifting(_) => "NOT_DRIFTING",
            Error::NonConvergent(_) => "NON_CONVERGENT",
            Error::PreconditionFailed(_) => "PRECONDITION_FAILED",
            Error::SamplingExhausted(_) => "SAMPLING_EXHAUSTED",
            Error::ConnectorNotFound { .. } => "CONNECTOR_NOT_FOUND",
            Error::UnknownSymbol(_) => "UNKNOWN_SYMBOL",
            Error::Io(_) => "IO",
        }
    }

    /// Field path for schema and validation errors.
    pub fn path(&self) -> Option<&str> {
        match self {
            Error::Schema { path, .. } | Error::Validation { path, .. } => Some(path),
            _ => None,
        }
    }

    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { path: path.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
