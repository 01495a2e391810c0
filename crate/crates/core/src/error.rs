use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("parameter `{name}` = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid codec configuration: {0}")]
    InvalidCodec(String),

    #[error("numerical integration did not converge: {0}")]
    Quadrature(String),

    #[error("normalization underflow while tilting with sigma = {0}")]
    Underflow(f64),

    #[error("concave-hull duality check failed: left side {left}, right side {right}")]
    HullMismatch { left: f64, right: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain { name, value, expected }
}
