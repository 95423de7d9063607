use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no qualifying document for {target} with label {label}")]
    SamplingUnsatisfiable { target: String, label: u8 },

    #[error("feature id {id} out of range for vocabulary of size {dim}")]
    EncodingRange { id: u32, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionError { left: usize, right: usize },

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("unknown clause {clause} (bank has {clauses})")]
    UnknownClause { clause: usize, clauses: usize },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("invalid k={k} for {points} points")]
    InvalidK { k: usize, points: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
