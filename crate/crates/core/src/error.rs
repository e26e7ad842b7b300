use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid variable: {0}")]
    InvalidVariable(String),

    #[error("vertex component {index} = {value} out of range for variable of size {size}")]
    VertexOutOfRange {
        index: usize,
        value: usize,
        size: usize,
    },

    #[error("vertex has {got} components, search space has {expected} variables")]
    VertexArity { expected: usize, got: usize },

    #[error("search space of {size} vertices exceeds the enumeration cap of {cap}")]
    SpaceTooLarge { size: u128, cap: u128 },

    #[error("eigendecomposition failed on a {size}x{size} Laplacian (max |entry| = {max_abs})")]
    Eigendecomposition { size: usize, max_abs: f64 },

    #[error("matrix not positive definite after jitter {jitter:e} (n = {size})")]
    NotPositiveDefinite { size: usize, jitter: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("slice sampler started at a point of zero density (x0 = {0})")]
    ZeroDensityStart(f64),

    #[error("search space exhausted: all {0} vertices have been evaluated")]
    Exhausted(u128),
}
