use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("circulant embedding has eigenvalue {value:e} at index {index} (max {max:e})")]
    NegativeEigenvalue { index: usize, value: f64, max: f64 },

    #[error("series of length {len} is too short (need at least {min})")]
    SeriesTooShort { len: usize, min: usize },

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("not enough points for a fit: {got} available, {needed} required")]
    InsufficientPoints { got: usize, needed: usize },

    #[error("non-positive value {value} at index {index} in log-log input")]
    NonPositive { index: usize, value: f64 },

    #[error("integration diverged at step {step}")]
    Divergence { step: usize },

    #[error("ensemble mean of the observable is zero at window {window}; choose an observable with nonzero mean")]
    ZeroMean { window: usize },

    #[error("{dropped} of {total} realizations failed (first error: {first})")]
    TooManyDrops {
        dropped: usize,
        total: usize,
        first: String,
    },

    #[error("ensemble needs {required} samples but the budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
