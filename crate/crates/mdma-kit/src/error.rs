//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid count: {what} must be >= {min}, got {got}")]
    InvalidCount {
        what: &'static str,
        min: usize,
        got: usize,
    },
    #[error("span [{start}, {end}) out of range for {what} of length {len}")]
    SpanOutOfRange {
        what: &'static str,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("spans [{a_start}, {a_end}) and [{b_start}, {b_end}) overlap")]
    OverlappingSpans {
        a_start: usize,
        a_end: usize,
        b_start: usize,
        b_end: usize,
    },
    #[error("expected {expected} spans (one per object), got {got}")]
    SpanCountMismatch { expected: usize, got: usize },
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: String,
        got: String,
    },
    #[error("index out of range: {what} = {got}, limit {limit}")]
    IndexOutOfRange {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("selection is empty")]
    EmptySelection,
    #[error("mask is empty")]
    EmptyMask,
    #[error("unknown mode: {0}")]
    UnknownMode(String),
    #[error("dense mask would have {entries} entries, cap is {cap}")]
    DenseTooLarge { entries: u64, cap: u64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("tensor entry {index} = {value} is not a binary 0/1 value")]
    NotBinary { index: usize, value: f32 },
    #[error("sequence has zero frames")]
    ZeroFrames,
    #[error("bad magic: expected \"FMT1\"")]
    BadMagic,
    #[error("bad tensor header: {0}")]
    BadHeader(String),
    #[error("truncated tensor payload: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("trailing bytes after tensor payload: {0} extra")]
    TrailingBytes(usize),
    #[error("tensor dimensions overflow the addressable size")]
    DimOverflow,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
