use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid function: {0}")]
    InvalidGrid(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("discrepancy band unreachable: {0}")]
    BandUnreachable(String),

    #[error("experiment row delta={delta:e}: {source}")]
    Row {
        delta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
