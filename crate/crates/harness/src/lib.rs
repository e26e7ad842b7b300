//! Experiment harness: run configuration, seeding, the optimization loops,
//! trace files, summaries and brute-force verification suites.

pub mod config;
pub mod error;
pub mod oracle;
pub mod runner;
pub mod seeds;
pub mod summary;
pub mod trace;

pub use config::{AnnealingConfig, Optimizer, RunConfig};
pub use error::{HarnessError, Result};
pub use runner::{run, run_combo, run_on, run_random_search, run_simulated_annealing};
pub use summary::{emit_summary, Summary, SummaryRow};
pub use trace::{Trace, TraceRecord};
