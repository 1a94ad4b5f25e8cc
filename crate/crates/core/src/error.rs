use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{g} does not generate the multiplicative group mod {p}")]
    NotGenerator { p: u64, g: u64 },
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("no prime p = 1 mod 3 with 4p^2 < {0} < 5p^2 and p >= 7")]
    PrimeNotFound(u64),
    #[error("convolution engine unavailable: {0}")]
    EngineUnavailable(String),
    #[error("no representation: {0}")]
    NoRepresentation(String),
    #[error("series does not converge: {0}")]
    NonConvergent(String),
    #[error("unsupported family kind: {0}")]
    UnsupportedKind(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name, used in JSON error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::NotOddPrime(_) => "NotOddPrime",
            Error::NotGenerator { .. } => "NotGenerator",
            Error::Range(_) => "RangeError",
            Error::PrimeNotFound(_) => "PrimeNotFound",
            Error::EngineUnavailable(_) => "EngineUnavailable",
            Error::NoRepresentation(_) => "NoRepresentation",
            Error::NonConvergent(_) => "NonConvergent",
            Error::UnsupportedKind(_) => "UnsupportedKind",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
