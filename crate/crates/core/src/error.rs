use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("energy underflow: requested {requested} mJ but only {available} mJ available")]
    Underflow { requested: f64, available: f64 },

    #[error("insufficient nodes: {available} available, at least {required} required")]
    InsufficientNodes { required: usize, available: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn class(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Overflow(_) => "overflow",
            Error::Underflow { .. } => "underflow",
            Error::InsufficientNodes { .. } => "insufficient_nodes",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::UndefinedMetric(_) => "undefined_metric",
            Error::Io(_) => "io",
        }
    }
}
