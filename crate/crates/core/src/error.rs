use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} outside the supported range 1..={max}", max = crate::linalg::MAX_DIM)]
    InvalidDimension(usize),

    #[error("matrix is not invertible over GF(2)")]
    NotInvertible,

    #[error("no invertible matrix found after {0} tries")]
    Exhausted(u32),

    #[error("malformed matrix data: {0}")]
    Format(String),

    #[error("ciphertext length {0} is not a positive whole number of blocks")]
    BadLength(usize),

    #[error("padding is malformed")]
    BadPadding,

    #[error("the oracle refuses a tamper seed in secure mode")]
    TamperRejected,

    #[error("cipher state or session is open in the other direction")]
    WrongDirection,

    #[error("unknown session {0}")]
    UnknownSession(u64),

    #[error("recovered secrets do not reproduce the observed outputs")]
    VerificationFailed,

    #[error("no key accepted by screening after {0} attempts")]
    ScreeningExhausted(u32),
}

impl Error {
    /// Stable short name, printed by the CLI on failure.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::NotInvertible => "NotInvertible",
            Error::Exhausted(_) => "Exhausted",
            Error::Format(_) => "Format",
            Error::BadLength(_) => "BadLength",
            Error::BadPadding => "BadPadding",
            Error::TamperRejected => "TamperRejected",
            Error::WrongDirection => "WrongDirection",
            Error::UnknownSession(_) => "UnknownSession",
            Error::VerificationFailed => "VerificationFailed",
            Error::ScreeningExhausted(_) => "ScreeningExhausted",
        }
    }
}
