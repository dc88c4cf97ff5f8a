use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the domain of a physical formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Quadrature or other numerical procedure did not converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A matrix failed density-matrix validation.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("config error: {0}")]
    Config(String),

    /// Propagation aborted because the trace drifted out of tolerance.
    #[error("trace drift {drift:.3e} at t = {time} ps exceeds {limit:.1e}")]
    TraceDrift { time: f64, drift: f64, limit: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
