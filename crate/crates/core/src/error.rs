use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    /// The series did not certify its tail within `max_terms`.
    #[error("series not certified after {terms} terms (partial sum {partial}, tail bound {tail_bound})")]
    Truncation {
        partial: f64,
        terms: usize,
        tail_bound: f64,
    },

    #[error("test function `{name}` is not finite at t = {t}")]
    FunctionDomain { name: String, t: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
