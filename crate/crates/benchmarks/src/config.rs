//! Serializable benchmark selection, so an instance can be rebuilt exactly
//! from a config file and a seed.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::branin::{Branin, BraninConfig};
use crate::contamination::{Contamination, ContaminationConfig};
use crate::ising::{Ising, IsingConfig};
use crate::pest::{PestConfig, PestControl};
use crate::synthetic::{random_wcnf_text, SparseBinary, SparseConfig};
use crate::wcnf::{load_wcnf, parse_wcnf_with, WMaxSat, Weighting};
use crate::{BenchmarkError, Objective, Result};

pub const BENCHMARK_IDS: [&str; 6] = ["contamination", "ising", "branin", "pest", "wmaxsat", "sparse"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomWcnf {
    pub n_vars: usize,
    pub n_clauses: usize,
    pub max_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WmaxsatConfig {
    /// WCNF file; when absent a random instance is generated from the seed.
    pub path: Option<PathBuf>,
    pub random: RandomWcnf,
    pub weighting: Weighting,
    pub seed: Option<u64>,
}

impl Default for WmaxsatConfig {
    fn default() -> Self {
        WmaxsatConfig {
            path: None,
            random: RandomWcnf {
                n_vars: 10,
                n_clauses: 40,
                max_len: 3,
            },
            weighting: Weighting::Standardized,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BenchmarkConfig {
    Contamination(ContaminationConfig),
    Ising(IsingConfig),
    Branin(BraninConfig),
    Pest(PestConfig),
    Wmaxsat(WmaxsatConfig),
    Sparse(SparseConfig),
}

impl BenchmarkConfig {
    pub fn id(&self) -> &'static str {
        match self {
            BenchmarkConfig::Contamination(_) => "contamination",
            BenchmarkConfig::Ising(_) => "ising",
            BenchmarkConfig::Branin(_) => "branin",
            BenchmarkConfig::Pest(_) => "pest",
            BenchmarkConfig::Wmaxsat(_) => "wmaxsat",
            BenchmarkConfig::Sparse(_) => "sparse",
        }
    }

    pub fn default_for(id: &str) -> Result<Self> {
        Ok(match id {
            "contamination" => BenchmarkConfig::Contamination(ContaminationConfig::default()),
            "ising" => BenchmarkConfig::Ising(IsingConfig::default()),
            "branin" => BenchmarkConfig::Branin(BraninConfig::default()),
            "pest" => BenchmarkConfig::Pest(PestConfig::default()),
            "wmaxsat" => BenchmarkConfig::Wmaxsat(WmaxsatConfig::default()),
            "sparse" => BenchmarkConfig::Sparse(SparseConfig::default()),
            other => {
                return Err(BenchmarkError::Config(format!(
                    "unknown benchmark '{other}' (expected one of {})",
                    BENCHMARK_IDS.join(", ")
                )))
            }
        })
    }

    /// Builds the instance. `seed` is used unless the config pins its own.
    pub fn build(&self, seed: u64) -> Result<Box<dyn Objective>> {
        Ok(match self {
            BenchmarkConfig::Contamination(c) => Box::new(Contamination::new(c.clone(), seed)?),
            BenchmarkConfig::Ising(c) => Box::new(Ising::new(c.clone(), seed)?),
            BenchmarkConfig::Branin(c) => Box::new(Branin::new(c.clone())?),
            BenchmarkConfig::Pest(c) => Box::new(PestControl::new(c.clone(), seed)?),
            BenchmarkConfig::Wmaxsat(c) => {
                let inst = match &c.path {
                    Some(p) => load_wcnf(p, c.weighting)?,
                    None => {
                        let r = &c.random;
                        let text = random_wcnf_text(r.n_vars, r.n_clauses, r.max_len, c.seed.unwrap_or(seed));
                        parse_wcnf_with(&text, c.weighting)?
                    }
                };
                Box::new(WMaxSat::new(inst)?)
            }
            BenchmarkConfig::Sparse(c) => Box::new(SparseBinary::new(c.clone(), seed)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_builds() {
        for id in BENCHMARK_IDS {
            let c = BenchmarkConfig::default_for(id).unwrap();
            assert_eq!(c.id(), id);
            let obj = c.build(1).unwrap();
            assert_eq!(obj.name(), id);
            let v = obj.space().unrank(0);
            assert!(obj.evaluate(&v).unwrap().is_finite());
        }
        assert!(BenchmarkConfig::default_for("nas").is_err());
    }
}
