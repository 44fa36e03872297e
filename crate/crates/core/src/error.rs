use thiserror::Error;

/// Failure modes shared by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs are individually valid but do not fit together
    /// (mismatched meshes, grids or lengths, violated preconditions).
    #[error("contract violation: {0}")]
    Contract(String),
    /// A numerical routine failed to produce a trustworthy value.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric(msg.into())
}

/// Checks `0 < value < 1`, naming the parameter in the error.
pub(crate) fn check_open_unit(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} = {value} must lie in the open interval (0,1)"
        )))
    }
}
