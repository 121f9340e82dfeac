//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("unknown variable `{name}` at line {line}, column {col}")]
    UnknownVariable { name: String, line: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty point cloud: {0}")]
    EmptyCloud(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point lies outside the star of the base sub-complex")]
    OutsideStar,

    #[error("no simplex extends the carrier of the given base point")]
    NoExtendingSimplex,

    #[error("no plateau meets the width threshold (sample too sparse for a scale choice)")]
    NoPlateau,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
