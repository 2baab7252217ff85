use thiserror::Error;

/// Errors raised by the rvz-core operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("unknown subset `{0}`")]
    UnknownSubset(String),

    #[error("subset `{0}` is empty")]
    EmptySubset(String),

    #[error("index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("enumeration budget exceeded: {required} configurations required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("search budget exhausted: {0}")]
    SearchExhausted(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("iteration limit reached after {0} pivots")]
    IterationLimit(usize),

    #[error("numerical solver failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
