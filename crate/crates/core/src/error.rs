use crate::geometry::GeometryTag;
use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry tag mismatch: expected {expected:?}, got {got:?}")]
    TagMismatch {
        expected: GeometryTag,
        got: GeometryTag,
    },
    #[error("matrix is not SPD: minimum eigenvalue {min_eigenvalue}")]
    NotSpd { min_eigenvalue: f64 },
    #[error("sphere log undefined: inputs are (nearly) antipodal, <x,y> = {dot}")]
    Antipodal { dot: f64 },
    #[error("vector is not tangent at the given point: residual {residual}")]
    NotTangent { residual: f64 },
    #[error("invalid manifold point: {0}")]
    InvalidPoint(String),
    #[error("shape mismatch: {left:?} vs {right:?} in {op}")]
    ShapeMismatch {
        op: String,
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("infeasible transport weights: source sums to {source_sum}, target to {target_sum}")]
    InfeasibleWeights { source_sum: f64, target_sum: f64 },
    #[error("non-finite data: {0}")]
    NonFinite(String),
    #[error("bad file format: {0}")]
    Format(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training aborted: non-finite loss at {context}")]
    NanAbort { context: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
