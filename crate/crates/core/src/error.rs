use thiserror::Error;

/// Errors raised by the library. Each variant belongs to one of three
/// classes (see [`ErrorKind`]) which the CLI maps onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("number field mismatch: {0}")]
    FieldMismatch(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("leading coefficient p_L vanishes at n = {n}")]
    SingularLeading { n: u64 },

    #[error("support enumeration exceeded {cap} points; the term's support is not finite")]
    UnboundedSupport { cap: u64 },

    #[error("ill-conditioned fit: condition estimate {estimate:.3e} exceeds {limit:.3e}")]
    IllConditioned { estimate: f64, limit: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("internal error: {0}")]
    Internal(String),
}

/// Coarse classification used for the CLI exit-code policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input or violated precondition (exit 1).
    User,
    /// Ill-conditioned or non-convergent numerics (exit 2).
    Numerical,
    /// Broken internal invariant (exit 3).
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::IllConditioned { .. } | Error::NoConvergence(_) => ErrorKind::Numerical,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::User,
        }
    }

    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
