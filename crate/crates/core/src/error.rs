use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CdefError {
    #[error("frame has zero width or height")]
    EmptyFrame,
    #[error("unsupported bit depth {0} (expected 8, 10 or 12)")]
    BitDepth(u8),
    #[error("sample value {value} at index {index} exceeds {bit_depth}-bit range")]
    SampleRange {
        index: usize,
        value: u16,
        bit_depth: u8,
    },
    #[error("dimension mismatch: {0}")]
    Dimensions(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("bitstring truncated: needed {needed} bits, {available} available")]
    Truncated { needed: usize, available: usize },
    #[error("{0} trailing bits after frame parameters")]
    TrailingBits(usize),
    #[error("malformed container: {0}")]
    Format(String),
    #[error("search instance too large for exhaustive enumeration ({0} combinations)")]
    TooLarge(u128),
}

pub type Result<T> = std::result::Result<T, CdefError>;
