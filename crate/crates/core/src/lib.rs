//! Combinatorial Bayesian optimization on graph Cartesian products.
//!
//! Every categorical or ordinal variable is represented by a small sub-graph
//! (complete or path). The search space is the Cartesian product of those
//! sub-graphs and is never materialized: kernels are assembled from
//! per-variable factors computed from each sub-graph's Laplacian
//! eigensystem.
//!
//! The pieces, bottom-up:
//!
//! - [`graph`]: sub-graphs, eigensystems, the implicit product space.
//! - [`kernel`]: the ARD diffusion kernel as per-variable Gram factors.
//! - [`surrogate`]: GP marginal likelihood and predictive distribution.
//! - [`inference`]: priors and slice sampling of GP parameters.
//! - [`acquisition`]: expected improvement and its maximization.
//! - [`oracle`]: dense brute-force reference routines for verification.

pub mod acquisition;
pub mod error;
pub mod exec;
pub mod graph;
pub mod inference;
pub mod kernel;
mod linalg;
pub mod oracle;
pub mod surrogate;

pub use error::{Error, Result};
pub use graph::{SearchSpace, SubGraph, SubGraphKind, Vertex};
pub use kernel::KernelFactors;
pub use surrogate::{Dataset, GpParams, PredictiveDistribution};
