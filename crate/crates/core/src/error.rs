use thiserror::Error;

use crate::algebra::LaurentPoly;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },

    #[error("exponent vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid variable map: {0}")]
    Relabel(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Division(#[from] DivisionError),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("memo cache: {0}")]
    Cache(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

/// Raised when a polynomial is not divisible by `t_a - t_b`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("t{a} - t{b} does not divide the input; remainder has {} terms", .remainder.len())]
pub struct DivisionError {
    pub a: usize,
    pub b: usize,
    pub remainder: LaurentPoly,
}
