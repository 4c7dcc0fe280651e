use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The half-maximum level is crossed at these abscissae, which does not
    /// bound a single connected peak.
    #[error("ambiguous width: half-maximum crossings at {crossings:?}")]
    AmbiguousWidth { crossings: Vec<f64> },
}
