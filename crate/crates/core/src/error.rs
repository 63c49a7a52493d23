use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("mu not normalized (sum = {0})")]
    MuNotNormalized(f64),

    #[error("negative probability {value} at {location}")]
    NegativeProbability { value: f64, location: String },

    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("conditioning on null event (probability {0:e})")]
    NullEvent(f64),

    #[error("no quantum advantage margin: nu = {nu} >= delta = {delta}")]
    NoMargin { nu: f64, delta: f64 },

    #[error("correlated sampling precondition violated: total variation {0} >= 1")]
    DisjointDistributions(f64),

    #[error("shared randomness stream exhausted after {0} draws")]
    StreamExhausted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
