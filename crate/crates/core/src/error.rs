use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not special unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("winding produces negative angle theta_{index} = {angle}")]
    Winding { index: usize, angle: f64 },

    #[error("synthesis failed: {message} (residual {residual:.3e} after {iterations} iterations)")]
    Synthesis {
        message: String,
        residual: f64,
        iterations: usize,
    },

    #[error("not enough usable points for a slope fit: {0}")]
    Precision(String),
}

impl Error {
    /// Short machine-readable tag, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotUnitary { .. } => "not_unitary",
            Error::Winding { .. } => "winding",
            Error::Synthesis { .. } => "synthesis",
            Error::Precision(_) => "precision",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
