//! Contamination control in a food supply chain.
//!
//! At each of `d` stages a binary decision `x_i` applies a prevention
//! effort at cost `c_i`. The contaminated fraction evolves as
//!
//! ```text
//! z_i = alpha_i (1 - x_i)(1 - z_{i-1}) + (1 - gamma_i x_i) z_{i-1}
//! ```
//!
//! with `z_0`, `alpha_i`, `gamma_i` Beta-distributed. The objective adds the
//! prevention cost and `rho` times the Monte-Carlo frequency of
//! `z_i > u` at every stage.

use combo_core::{SearchSpace, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::beta::BetaQuantile;
use crate::{check_binary, BenchmarkError, Objective, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContaminationConfig {
    pub d: usize,
    pub lambda: f64,
    pub rho: f64,
    /// Monte-Carlo trajectories.
    pub n_samples: usize,
    pub threshold: f64,
    pub epsilon: f64,
    /// Subtract `epsilon` from every stage's violation frequency, i.e.
    /// penalize `P(z_i > u) - epsilon`. Off by default.
    pub subtract_epsilon: bool,
    /// Per-stage prevention costs; `None` means 1 everywhere.
    pub costs: Option<Vec<f64>>,
    pub init_beta: [f64; 2],
    pub spread_beta: [f64; 2],
    pub restore_beta: [f64; 2],
    /// Pins the instance independently of the run seed.
    pub seed: Option<u64>,
}

impl Default for ContaminationConfig {
    fn default() -> Self {
        ContaminationConfig {
            d: 21,
            lambda: 0.0,
            rho: 1.0,
            n_samples: 100,
            threshold: 0.1,
            epsilon: 0.05,
            subtract_epsilon: false,
            costs: None,
            init_beta: [1.0, 30.0],
            spread_beta: [1.0, 17.0 / 3.0],
            restore_beta: [1.0, 3.0 / 7.0],
            seed: None,
        }
    }
}

impl ContaminationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchmarkError::Config(m));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if self.n_samples == 0 {
            return bad("n_samples must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold must lie in (0, 1), got {}", self.threshold));
        }
        if !(self.lambda >= 0.0 && self.rho >= 0.0 && self.lambda.is_finite() && self.rho.is_finite()) {
            return bad("lambda and rho must be finite and nonnegative".into());
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return bad(format!("epsilon must lie in [0, 1), got {}", self.epsilon));
        }
        if let Some(c) = &self.costs {
            if c.len() != self.d {
                return bad(format!("{} costs for {} stages", c.len(), self.d));
            }
        }
        for p in [self.init_beta, self.spread_beta, self.restore_beta] {
            BetaQuantile::new(p[0], p[1])?;
        }
        Ok(())
    }
}

/// A contamination instance with its Monte-Carlo draws fixed.
#[derive(Debug, Clone)]
pub struct Contamination {
    config: ContaminationConfig,
    space: SearchSpace,
    costs: Vec<f64>,
    z0: Vec<f64>,
    // [stage][trajectory]
    spread: Vec<Vec<f64>>,
    restore: Vec<Vec<f64>>,
}

impl Contamination {
    pub fn new(config: ContaminationConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let seed = config.seed.unwrap_or(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = config.n_samples;
        let q0 = BetaQuantile::new(config.init_beta[0], config.init_beta[1])?;
        let qa = BetaQuantile::new(config.spread_beta[0], config.spread_beta[1])?;
        let qg = BetaQuantile::new(config.restore_beta[0], config.restore_beta[1])?;
        let z0 = (0..t).map(|_| q0.quantile(rng.random())).collect();
        let spread = (0..config.d)
            .map(|_| (0..t).map(|_| qa.quantile(rng.random())).collect())
            .collect();
        let restore = (0..config.d)
            .map(|_| (0..t).map(|_| qg.quantile(rng.random())).collect())
            .collect();
        let costs = config.costs.clone().unwrap_or_else(|| vec![1.0; config.d]);
        Ok(Contamination {
            space: SearchSpace::binary(config.d)?,
            config,
            costs,
            z0,
            spread,
            restore,
        })
    }

    pub fn config(&self) -> &ContaminationConfig {
        &self.config
    }

    /// `(prevention cost, contamination penalty)`, without the `lambda`
    /// term.
    pub fn breakdown(&self, x: &[usize]) -> Result<(f64, f64)> {
        check_binary(x, self.config.d)?;
        let cost: f64 = x.iter().zip(&self.costs).map(|(&xi, c)| xi as f64 * c).sum();
        let t = self.config.n_samples;
        let u = self.config.threshold;
        let mut z = self.z0.clone();
        let mut penalty = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let xi = xi as f64;
            let mut over = 0usize;
            for (k, zk) in z.iter_mut().enumerate() {
                *zk = self.spread[i][k] * (1.0 - xi) * (1.0 - *zk) + (1.0 - self.restore[i][k] * xi) * *zk;
                if *zk > u {
                    over += 1;
                }
            }
            let mut freq = over as f64 / t as f64;
            if self.config.subtract_epsilon {
                freq -= self.config.epsilon;
            }
            penalty += self.config.rho * freq;
        }
        Ok((cost, penalty))
    }

    pub fn value(&self, x: &[usize]) -> Result<f64> {
        let (cost, penalty) = self.breakdown(x)?;
        let ones = x.iter().sum::<usize>() as f64;
        Ok(cost + penalty + self.config.lambda * ones)
    }
}

impl Objective for Contamination {
    fn name(&self) -> &str {
        "contamination"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, v: &Vertex) -> Result<f64> {
        self.value(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small(lambda: f64) -> Contamination {
        let cfg = ContaminationConfig {
            d: 6,
            lambda,
            ..ContaminationConfig::default()
        };
        Contamination::new(cfg, 42).unwrap()
    }

    #[test]
    fn all_ones_cost_decomposition() {
        let c = Contamination::new(
            ContaminationConfig {
                lambda: 1e-2,
                ..ContaminationConfig::default()
            },
            1,
        )
        .unwrap();
        let x = vec![1; 21];
        let (cost, penalty) = c.breakdown(&x).unwrap();
        assert_eq!(cost, 21.0);
        assert!(penalty >= 0.0);
        assert_eq!(c.value(&x).unwrap(), cost + penalty + 1e-2 * 21.0);
    }

    #[test]
    fn recursion_by_hand() {
        // one stage, one trajectory, draws read back from the instance
        let cfg = ContaminationConfig {
            d: 2,
            n_samples: 1,
            ..ContaminationConfig::default()
        };
        let c = Contamination::new(cfg, 7).unwrap();
        let (z0, a, g) = (c.z0[0], [c.spread[0][0], c.spread[1][0]], [c.restore[0][0], c.restore[1][0]]);
        for x in [[0usize, 0], [0, 1], [1, 0], [1, 1]] {
            let mut z = z0;
            let mut pen = 0.0;
            for i in 0..2 {
                let xi = x[i] as f64;
                z = a[i] * (1.0 - xi) * (1.0 - z) + (1.0 - g[i] * xi) * z;
                pen += if z > 0.1 { 1.0 } else { 0.0 };
            }
            let want = (x[0] + x[1]) as f64 + pen;
            assert_eq!(c.value(&x).unwrap(), want);
        }
    }

    #[test]
    fn epsilon_offset_shifts_by_constant() {
        let base = small(0.0);
        let off = Contamination::new(
            ContaminationConfig {
                d: 6,
                subtract_epsilon: true,
                ..ContaminationConfig::default()
            },
            42,
        )
        .unwrap();
        let x = [1, 0, 1, 1, 0, 0];
        let shift = base.value(&x).unwrap() - off.value(&x).unwrap();
        assert!((shift - 6.0 * 0.05).abs() < 1e-12);
    }

    #[test]
    fn errors_and_seed_pinning() {
        let c = small(0.0);
        assert!(matches!(c.value(&[0; 5]), Err(BenchmarkError::Length { .. })));
        assert!(matches!(c.value(&[0, 0, 2, 0, 0, 0]), Err(BenchmarkError::Category { .. })));
        let pinned = ContaminationConfig {
            d: 6,
            seed: Some(5),
            ..ContaminationConfig::default()
        };
        let a = Contamination::new(pinned.clone(), 1).unwrap();
        let b = Contamination::new(pinned, 2).unwrap();
        assert_eq!(a.value(&[1, 0, 1, 0, 1, 0]).unwrap(), b.value(&[1, 0, 1, 0, 1, 0]).unwrap());
        let bad = ContaminationConfig {
            threshold: 1.5,
            ..ContaminationConfig::default()
        };
        assert!(Contamination::new(bad, 0).is_err());
    }

    proptest! {
        #[test]
        fn lambda_term_is_additive(bits in proptest::collection::vec(0usize..2, 6)) {
            let a = small(0.0).value(&bits).unwrap();
            let b = small(1e-2).value(&bits).unwrap();
            let ones = bits.iter().sum::<usize>() as f64;
            prop_assert_eq!(b, a + 1e-2 * ones);
        }

        #[test]
        fn deterministic(bits in proptest::collection::vec(0usize..2, 6)) {
            let c = small(1e-4);
            prop_assert_eq!(c.value(&bits).unwrap().to_bits(), c.value(&bits).unwrap().to_bits());
        }
    }
}
