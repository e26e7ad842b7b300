use std::path::PathBuf;

use combo_core::Vertex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid run configuration: {0}")]
    Config(String),

    #[error("parsing {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error("evaluating vertex {vertex}: {source}")]
    Evaluation {
        vertex: Vertex,
        #[source]
        source: combo_benchmarks::BenchmarkError,
    },

    #[error(transparent)]
    Benchmark(#[from] combo_benchmarks::BenchmarkError),

    #[error(transparent)]
    Core(#[from] combo_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed trace: {message}")]
    Trace { path: PathBuf, message: String },

    #[error("cannot summarize: {0}")]
    Summary(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
