use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),
    #[error("branch-and-bound node limit of {0} exceeded")]
    NodeLimit(u64),
    #[error("enumeration cap of {cap} exceeded ({what})")]
    EnumerationCap { cap: u64, what: String },
    #[error("refinement limit of {0} exhausted")]
    RefinementExhausted(u32),
    #[error("column {column} of block {block} has no positive entry in any constraint row")]
    ZeroColumnUnsupported { block: usize, column: usize },
    #[error("value {value} lies outside the box range of scale {scale}")]
    OutOfRange { value: String, scale: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
