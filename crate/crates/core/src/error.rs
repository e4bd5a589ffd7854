use thiserror::Error;

use crate::geometry::Point4;

/// Errors raised by the meshing kernel and its tooling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("metric is not symmetric positive definite: {0}")]
    NonSpdMetric(String),
    #[error("unsupported tesseract subdivision with {0} pentatopes (expected 22, 23 or 24)")]
    UnsupportedSubdivision(usize),
    #[error("input point set is empty")]
    EmptyInput,
    #[error("no element contains point {0:?}")]
    GhostPoint(Point4),
    #[error("point {point:?} coincides with vertex {vertex}")]
    DuplicateVertex { point: Point4, vertex: u32 },
    #[error("mesh invariant violated: {0}")]
    Invariant(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid flip: {0}")]
    InvalidFlip(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
