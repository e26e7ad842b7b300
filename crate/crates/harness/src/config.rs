//! Run configuration, read from and written to TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use combo_benchmarks::BenchmarkConfig;
use combo_core::acquisition::AcquisitionConfig;
use combo_core::inference::{PriorConfig, SamplerConfig};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    #[default]
    Combo,
    RandomSearch,
    SimulatedAnnealing,
}

impl Optimizer {
    pub const ALL: [Optimizer; 3] = [Optimizer::Combo, Optimizer::RandomSearch, Optimizer::SimulatedAnnealing];

    pub fn as_str(&self) -> &'static str {
        match self {
            Optimizer::Combo => "combo",
            Optimizer::RandomSearch => "random-search",
            Optimizer::SimulatedAnnealing => "simulated-annealing",
        }
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Optimizer {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Optimizer::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown optimizer '{s}'")))
    }
}

/// Geometric cooling: the temperature is multiplied by `cooling` after
/// every evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealingConfig {
    pub initial_temperature: f64,
    pub cooling: f64,
}

impl Default for AnnealingConfig {
    fn default() -> Self {
        AnnealingConfig {
            initial_temperature: 1.0,
            cooling: 0.95,
        }
    }
}

fn default_n_init() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub benchmark: BenchmarkConfig,
    #[serde(default)]
    pub optimizer: Optimizer,
    /// Total number of objective evaluations, initial design included.
    pub budget: usize,
    #[serde(default = "default_n_init")]
    pub n_init: usize,
    pub seed: u64,
    /// Stop as soon as the best value is at or below this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// Fill the `seconds` trace column. Off by default so traces are
    /// byte-reproducible.
    #[serde(default)]
    pub record_time: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub acquisition: AcquisitionConfig,
    #[serde(default)]
    pub priors: PriorConfig,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub annealing: AnnealingConfig,
}

impl RunConfig {
    pub fn new(benchmark: BenchmarkConfig, optimizer: Optimizer, budget: usize, seed: u64) -> Self {
        RunConfig {
            benchmark,
            optimizer,
            budget,
            n_init: default_n_init(),
            seed,
            target: None,
            record_time: false,
            output: None,
            acquisition: AcquisitionConfig::default(),
            priors: PriorConfig::default(),
            sampler: SamplerConfig::default(),
            annealing: AnnealingConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.budget == 0 {
            return bad("budget must be at least 1".into());
        }
        if self.n_init == 0 {
            return bad("n_init must be at least 1".into());
        }
        if self.n_init >= self.budget {
            return bad(format!("n_init ({}) must be below the budget ({})", self.n_init, self.budget));
        }
        let a = &self.annealing;
        if !(a.initial_temperature >= 0.0 && a.initial_temperature.is_finite()) {
            return bad("annealing.initial_temperature must be finite and nonnegative".into());
        }
        if !(a.cooling > 0.0 && a.cooling <= 1.0) {
            return bad("annealing.cooling must lie in (0, 1]".into());
        }
        if self.target.is_some_and(|t| t.is_nan()) {
            return bad("target is NaN".into());
        }
        self.acquisition.validate()?;
        self.priors.validate()?;
        self.sampler.validate()?;
        Ok(())
    }

    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|source| HarnessError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }
}
