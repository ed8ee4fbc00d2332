use thiserror::Error;

/// Errors raised by lattice construction, encodings, bounds and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Parameters that are individually valid but inconsistent with each other.
    #[error("configuration error: {0}")]
    Config(String),
    /// The request exceeds what can be represented explicitly in memory.
    #[error("capability error: {0}")]
    Capability(String),
    /// A self-consistency check failed.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
