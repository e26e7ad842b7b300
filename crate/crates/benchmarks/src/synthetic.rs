//! Seeded synthetic problems for tests: random weighted MaxSAT instances
//! and a binary objective that ignores most of its inputs.

use combo_core::{SearchSpace, Vertex};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::wcnf::{parse_wcnf_with, WcnfInstance, Weighting};
use crate::{check_binary, BenchmarkError, Objective, Result};

/// Random instance text: integer weights in `1..=10`, clauses of 1 to
/// `max_len` distinct variables with random signs.
pub fn random_wcnf_text(n_vars: usize, n_clauses: usize, max_len: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = format!("c random instance, seed {seed}\np wcnf {n_vars} {n_clauses}\n");
    for _ in 0..n_clauses {
        let w: u32 = rng.random_range(1..=10);
        s.push_str(&w.to_string());
        let len = rng.random_range(1..=max_len.min(n_vars));
        for v in index::sample(&mut rng, n_vars, len) {
            let lit = (v + 1) as i64;
            let lit = if rng.random::<bool>() { lit } else { -lit };
            s.push_str(&format!(" {lit}"));
        }
        s.push_str(" 0\n");
    }
    s
}

pub fn random_wcnf(n_vars: usize, n_clauses: usize, max_len: usize, seed: u64) -> Result<WcnfInstance> {
    parse_wcnf_with(&random_wcnf_text(n_vars, n_clauses, max_len, seed), Weighting::Standardized)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SparseConfig {
    pub n_vars: usize,
    /// Indices of the variables the objective depends on.
    pub active: Vec<usize>,
    pub seed: Option<u64>,
}

impl Default for SparseConfig {
    fn default() -> Self {
        SparseConfig {
            n_vars: 10,
            active: vec![0, 1, 2],
            seed: None,
        }
    }
}

/// `sum_a w_a s_a + sum_{a<b} w_ab s_a s_b` over the active variables with
/// spins `s = 2x - 1` and weights uniform in `[-1, 1]` (linear weights
/// pushed away from zero so every active variable matters).
#[derive(Debug, Clone)]
pub struct SparseBinary {
    config: SparseConfig,
    space: SearchSpace,
    linear: Vec<f64>,
    pairwise: Vec<Vec<f64>>,
}

impl SparseBinary {
    pub fn new(config: SparseConfig, seed: u64) -> Result<Self> {
        if config.active.iter().any(|&a| a >= config.n_vars) {
            return Err(BenchmarkError::Config("active variable index out of range".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(seed));
        let k = config.active.len();
        let linear = (0..k)
            .map(|_| {
                let m: f64 = rng.random_range(0.5..1.0);
                if rng.random::<bool>() {
                    m
                } else {
                    -m
                }
            })
            .collect();
        let pairwise = (0..k)
            .map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        Ok(SparseBinary {
            space: SearchSpace::binary(config.n_vars)?,
            config,
            linear,
            pairwise,
        })
    }

    pub fn active(&self) -> &[usize] {
        &self.config.active
    }

    pub fn value(&self, x: &[usize]) -> Result<f64> {
        check_binary(x, self.config.n_vars)?;
        let s: Vec<f64> = self
            .config
            .active
            .iter()
            .map(|&a| 2.0 * x[a] as f64 - 1.0)
            .collect();
        let mut f = 0.0;
        for a in 0..s.len() {
            f += self.linear[a] * s[a];
            for b in a + 1..s.len() {
                f += self.pairwise[a][b] * s[a] * s[b];
            }
        }
        Ok(f)
    }
}

impl Objective for SparseBinary {
    fn name(&self) -> &str {
        "sparse"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, v: &Vertex) -> Result<f64> {
        self.value(v)
    }
}
