use thiserror::Error;

/// Errors raised while building or testing a choice domain.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DrumError {
    #[error("invalid budget {period}/{index}: {reason}")]
    InvalidBudget {
        period: usize,
        index: usize,
        reason: String,
    },
    #[error("budgets {first} and {second} describe the same plane")]
    DuplicateBudget { first: String, second: String },
    #[error("budgets span several periods ({0} and {1}); expected a single period")]
    MixedPeriods(usize, usize),
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point {0} is not on any budget plane")]
    OffPlane(String),
    #[error("cannot compare patches from periods {0} and {1}")]
    CrossPeriod(usize, usize),
    #[error("period {0} has no rational demand type")]
    NoTypes(usize),
    #[error("profile matrix would hold {entries} entries, above the cap of {cap}")]
    TooManyColumns { entries: u128, cap: u128 },
    #[error("budget path {0} is not observed")]
    UnknownBudgetPath(String),
    #[error("choice path {0} is not a row of the profile matrix")]
    UnknownChoicePath(String),
    #[error("probabilities for budget path {path} sum to {sum}, expected 1")]
    NotNormalized { path: String, sum: String },
    #[error("negative probability {value} on {path}")]
    NegativeProbability { path: String, value: String },
    #[error("mixture weights are invalid: {0}")]
    InvalidWeights(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("simulated demand lands on intersection patch {0}; perturb the preference parameters")]
    IntersectionDemand(String),
    #[error("invalid utility specification: {0}")]
    InvalidSpec(String),
    #[error("oracle column cap exceeded: {columns} > {cap}")]
    OracleCap { columns: usize, cap: usize },
    #[error("repeated budget across periods: {first} and {second}")]
    RepeatedBudget { first: String, second: String },
    #[error("empty panel")]
    EmptyPanel,
    #[error("panel row {row}: {reason}")]
    PanelRow { row: usize, reason: String },
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, DrumError>;
