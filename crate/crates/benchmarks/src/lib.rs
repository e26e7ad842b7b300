//! Objective functions over combinatorial search spaces.
//!
//! Every stochastic benchmark draws its random quantities once, at
//! construction, from the instance seed. Evaluations are then pure
//! functions of the vertex: the same input gives bit-identical output.

mod beta;
pub mod branin;
pub mod config;
pub mod contamination;
pub mod ising;
pub mod pest;
pub mod synthetic;
pub mod wcnf;

use combo_core::{SearchSpace, Vertex};
use thiserror::Error;

pub use config::BenchmarkConfig;

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("input has {got} components, expected {expected}")]
    Length { expected: usize, got: usize },

    #[error("component {index} = {value} out of range 0..{size}")]
    Category { index: usize, value: usize, size: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid benchmark configuration: {0}")]
    Config(String),

    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] combo_core::Error),
}

pub type Result<T> = std::result::Result<T, BenchmarkError>;

/// A black-box function to minimize over a search space.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;
    fn space(&self) -> &SearchSpace;
    fn evaluate(&self, v: &Vertex) -> Result<f64>;
}

/// Checks arity and range of `x` against per-variable sizes.
pub(crate) fn check_input(x: &[usize], sizes: &[usize]) -> Result<()> {
    if x.len() != sizes.len() {
        return Err(BenchmarkError::Length {
            expected: sizes.len(),
            got: x.len(),
        });
    }
    for (index, (&value, &size)) in x.iter().zip(sizes).enumerate() {
        if value >= size {
            return Err(BenchmarkError::Category { index, value, size });
        }
    }
    Ok(())
}

pub(crate) fn check_binary(x: &[usize], d: usize) -> Result<()> {
    if x.len() != d {
        return Err(BenchmarkError::Length { expected: d, got: x.len() });
    }
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, &v)| v > 1) {
        return Err(BenchmarkError::Category { index, value, size: 2 });
    }
    Ok(())
}
