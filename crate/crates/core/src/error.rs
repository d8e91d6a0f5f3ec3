use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure in this crate is a violated precondition: the inputs are
/// outside the domain where an operation is defined or validated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is invalid: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("`{name}` = {value} exceeds the limit {limit}")]
    LimitExceeded {
        name: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("{0}")]
    Precondition(String),
    #[error("series did not converge within {0} terms")]
    NotConverged(usize),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
