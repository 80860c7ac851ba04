use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or missing configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A physical validity condition of the model does not hold.
    #[error("regime error: {0}")]
    Regime(String),

    #[error("integration failed at t = {time:e} s: {reason}")]
    Integration { time: f64, reason: String },

    /// The particle energy is not below the barrier top, so there is no
    /// classically forbidden region.
    #[error("above barrier: {0}")]
    AboveBarrier(String),

    /// Field leaks past the edge of the transverse grid.
    #[error("aliasing error: {0}; widen the transverse grid")]
    Aliasing(String),

    #[error("catalog entry `{entry}`: {reason}")]
    Load { entry: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e.to_string()))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
