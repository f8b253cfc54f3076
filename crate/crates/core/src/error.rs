use thiserror::Error;

/// Errors produced by the library.
///
/// `BudgetExceeded` is kept separate from the other variants so that front
/// ends can map it to a distinct exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("vertex {vertex} out of range for a hypergraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge {index} is invalid: {reason}")]
    InvalidEdge { index: usize, reason: String },

    #[error("expected a vector of length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("hypergraph is not {expected}-uniform")]
    NotUniform { expected: usize },

    #[error("edges do not form a matching: {0}")]
    NotMatching(String),

    #[error("enumeration of {required} items exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("integer overflow while evaluating {0}")]
    Overflow(&'static str),

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
