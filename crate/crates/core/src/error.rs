use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("non-finite coordinate in vector")]
    NonFinite,

    #[error("point is not strictly inside the unit ball (|z|^2 = {norm_sq})")]
    OutsideBall { norm_sq: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid space parameters: {0}")]
    InvalidParams(String),

    #[error("symbol error at `{path}`: {message}")]
    Symbol { path: String, message: String },

    #[error("self-map rejected: |phi(z)| = {norm} >= 1 at z = {point:?}")]
    SelfMapRejected { norm: f64, point: Vec<[f64; 2]> },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("eigen solver failure: {message} (condition number of B = {condition})")]
    Eigen { message: String, condition: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn symbol(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Symbol {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
