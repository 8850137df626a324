use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Ball arithmetic could not reach the requested radius below the precision cap.
    #[error("precision {0} bits exceeded the cap without reaching the target radius")]
    PrecisionUnreachable(u32),
    /// A certified comparison could not separate its two sides.
    #[error("undecided comparison: {0}")]
    Undecided(String),
    /// A request exceeds the memory or enumeration budget.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
