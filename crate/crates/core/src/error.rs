use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("the zero polynomial has no roots to count or enclose")]
    ZeroPolynomial,

    #[error("endpoint {0} is a root of the polynomial")]
    RootAtEndpoint(String),

    #[error("empty interval: lower endpoint must be below upper endpoint")]
    EmptyInterval,

    #[error("polynomial must be monic, leading coefficient is {0}")]
    NotMonic(String),

    #[error("polynomial degree {degree} is below the minimum {min}")]
    DegreeTooSmall { degree: usize, min: usize },

    #[error("polynomial degree {degree} exceeds the supported cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("polynomial has repeated roots")]
    NotSquarefree,

    #[error("could not certify disjoint root enclosures at {bits} bits")]
    CertificationFailed { bits: u32 },

    #[error("numerical precision exhausted at {bits} bits")]
    PrecisionExhausted { bits: u32 },

    #[error("enumeration needs about {estimated} candidates, budget is {budget}")]
    BudgetExceeded { estimated: u128, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("input is not a Salem polynomial: {0}")]
    NotSalem(String),

    #[error("enumeration cancelled")]
    Cancelled,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
