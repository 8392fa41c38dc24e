use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("time index {index} outside window of {len} steps")]
    OutOfWindow { index: usize, len: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature too coarse: {points} points for max offset {max_offset} (need at least {required})")]
    InsufficientQuadrature { points: usize, max_offset: usize, required: usize },
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("operator is not the left-right transport matrix: {0}")]
    NotTransport(String),
    #[error("cannot compare a {0} operator with a {1} operator")]
    MixedKinds(&'static str, &'static str),
    #[error("singular fit: {0}")]
    SingularFit(String),
    #[error("initial data aliases on the coarsest grid: {0}")]
    Aliasing(String),
    #[error("light cone wraps around the lattice: {0}")]
    WrapDetected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
