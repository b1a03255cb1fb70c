use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("node {node} has zero degree")]
    ZeroDegree { node: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("invalid inter-layer weights: {0}")]
    InvalidWeights(String),

    #[error("eigensolver did not converge for a matrix of order {order} within {cap} iterations")]
    NoConvergence { order: usize, cap: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("vector length {len} is not divisible into {blocks} blocks")]
    BadLength { len: usize, blocks: usize },

    #[error("vector is not unit norm (norm = {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("graph generation failed after {attempts} rejected draws")]
    GenerationFailed { attempts: usize },

    #[error("infeasible calibration: {0}")]
    InfeasibleCalibration(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
