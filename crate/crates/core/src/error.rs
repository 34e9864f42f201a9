use thiserror::Error;

use crate::operator::Cycle;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("cycle order p = {p} exceeds the enumeration cap {cap} (set PCM_MAX_P to raise it)")]
    OrderTooLarge { p: usize, cap: usize },

    #[error("{0}")]
    Domain(String),

    #[error("operation not supported for p = {p}: {reason}")]
    Unsupported { p: usize, reason: &'static str },

    #[error("operator is not {p}-cyclically monotone (cyclic sum {sum})")]
    NotCyclicallyMonotone {
        p: usize,
        sum: String,
        witness: Box<Cycle>,
    },

    #[error(
        "perpendicularity hypothesis fails between nodes {index} and {next}: inner product {value}"
    )]
    NotPerpendicular {
        index: usize,
        next: usize,
        value: String,
    },

    #[error("construction step {step} at {point}: {reason}")]
    Degenerate {
        step: usize,
        point: String,
        reason: String,
    },

    #[error("postcondition violated: {0}")]
    Postcondition(String),

    #[error("unknown fiber engine `{0}`")]
    UnknownEngine(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
