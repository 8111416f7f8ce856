use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Root enumeration produced a result that the residual's structure rules out.
    #[error("solver error: {0}")]
    Solver(String),
    /// The implicit function theorem does not apply at this point.
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
