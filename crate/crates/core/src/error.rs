use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("side length mismatch: {left} vs {right}")]
    SideMismatch { left: usize, right: usize },

    #[error("table with {entries} entries exceeds the cap of {cap} entries")]
    MemoryCap { entries: u128, cap: usize },

    #[error("value at flat index {index} is negative or not a number")]
    NegativeValue { index: usize },

    #[error("factor {index} has zero mass")]
    ZeroMassInput { index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unimodality chain broken at index {index}")]
    UnimodalityViolation { index: usize },

    #[error("zero denominator{}", match .coordinate { Some(j) => format!(" at coordinate {j}"), None => String::new() })]
    ZeroDenominator { coordinate: Option<usize> },

    #[error("coordinate {coordinate} lies on the boundary of [0,1]")]
    BoundaryParameter { coordinate: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("unsupported format `{0}` for this report")]
    UnsupportedFormat(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
