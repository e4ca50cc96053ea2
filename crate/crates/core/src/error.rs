use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge on [{a}, {b}]: achieved error {achieved:.3e}, requested {requested:.3e}")]
    Quadrature {
        a: f64,
        b: f64,
        achieved: f64,
        requested: f64,
    },

    /// The integral is infinite for this measure and exponent combination.
    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("moment sequence has n_max = {available}, need at least {required}")]
    DegreeMismatch { required: usize, available: usize },

    #[error("{0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::DegreeMismatch { .. } | Error::Io(_) => 2,
            Error::Quadrature { .. } | Error::Divergent(_) | Error::Numerical(_) => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
