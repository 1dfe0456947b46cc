use thiserror::Error;

/// Errors reported by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value violates its documented invariant.
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation received an argument outside its domain.
    #[error("input error: {0}")]
    Input(String),
    /// A statistic cannot be formed from the available data.
    #[error("undefined statistic: {0}")]
    Statistic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
