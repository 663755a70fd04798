use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// name the precondition that failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("size cap exceeded: {0}")]
    Cap(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("degenerate polynomial: every derivative norm is zero")]
    DegeneratePolynomial,

    #[error("moment order p = {p} is not estimable from {n} samples (max admissible p = {max_p:.4})")]
    MomentGuard { p: f64, n: usize, max_p: f64 },

    #[error("tensor is not a valid undecoupled chaos kernel: {0}")]
    ChaosKernel(String),

    #[error("matrix is not symmetric: |M[{i},{j}] - M[{j},{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
