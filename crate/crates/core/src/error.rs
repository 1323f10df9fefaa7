use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A size guard tripped; the message names the cheaper alternative.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The floating-point root isolator could not certify its answer.
    #[error("root certification failed near x = {location}: {reason}")]
    Certification { location: f64, reason: String },

    /// The request targets an event that is impossible by a parity argument.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed table cache: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}
