use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("domain mismatch: {0}")]
    Domain(String),

    #[error("non-finite {what} at x = {at}")]
    Evaluation { what: &'static str, at: f64 },

    #[error("cell {index} {cell} has zero probability")]
    EmptyCell { index: usize, cell: String },

    #[error("limit toward {endpoint} could not be determined: {reason}")]
    LimitUndetermined { endpoint: f64, reason: String },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for errors caused by bad input rather than a numeric breakdown.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::TooFewSamples(_)
                | Error::Domain(_)
                | Error::EmptyCell { .. }
        )
    }
}
