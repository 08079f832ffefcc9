use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MomentError {
    #[error("simplex violation: {0}")]
    SimplexViolation(String),
    #[error("probability vector is empty (d = 0)")]
    EmptyDimension,
    #[error("trial count must be at least 1, got {0}")]
    BadTrialCount(u64),
    #[error("index {index} out of range 1..={d}")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("moment order must be between 1 and 4, got {0}")]
    BadOrder(usize),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("lattice point {0:?} lies outside the support")]
    SupportViolation(Vec<i64>),
    #[error("support has {points} points, above the enumeration budget of {budget}")]
    BudgetExceeded { points: u128, budget: u64 },
    #[error("{0}")]
    Parse(String),
}

pub type Result<T, E = MomentError> = std::result::Result<T, E>;
