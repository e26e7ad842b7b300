//! Pest control along a chain of stations.
//!
//! Each station chooses no action (0) or one of four pesticides (1-4).
//! Pests spread as in contamination control; a used pesticide removes a
//! Beta-distributed fraction. Repeated purchases of the same pesticide get
//! cheaper, and repeated use makes it less effective:
//!
//! ```text
//! price  = base_l * max(floor, 1 - discount_rate * purchases_so_far_l)
//! effect ~ Beta(control_alpha, beta_l * (1 + tolerance_rate * uses_so_far_l))
//! ```

use combo_core::{SearchSpace, SubGraph, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::beta::BetaQuantile;
use crate::{check_input, BenchmarkError, Objective, Result};

pub const N_CHOICES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PestConfig {
    pub stations: usize,
    pub rho: f64,
    pub n_samples: usize,
    pub threshold: f64,
    /// Weight of `||x||_1` (sum of choice indices); 0 disables it.
    pub lambda: f64,
    pub init_beta: [f64; 2],
    pub spread_beta: [f64; 2],
    pub control_alpha: f64,
    pub prices: [f64; 4],
    pub control_betas: [f64; 4],
    pub discount_rate: f64,
    pub discount_floor: f64,
    pub tolerance_rate: f64,
    pub seed: Option<u64>,
}

impl Default for PestConfig {
    fn default() -> Self {
        PestConfig {
            stations: 21,
            rho: 1.0,
            n_samples: 100,
            threshold: 0.1,
            lambda: 0.0,
            init_beta: [1.0, 30.0],
            spread_beta: [1.0, 17.0 / 3.0],
            control_alpha: 1.0,
            prices: [1.0, 0.8, 0.7, 0.5],
            control_betas: [2.0 / 7.0, 3.0 / 7.0, 3.0 / 7.0, 5.0 / 7.0],
            discount_rate: 0.05,
            discount_floor: 0.5,
            tolerance_rate: 0.2,
            seed: None,
        }
    }
}

impl PestConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchmarkError::Config(m));
        if self.stations == 0 || self.n_samples == 0 {
            return bad("stations and n_samples must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold must lie in (0, 1), got {}", self.threshold));
        }
        let nonneg = [self.rho, self.lambda, self.discount_rate, self.tolerance_rate];
        if nonneg.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return bad("rho, lambda, discount_rate and tolerance_rate must be nonnegative".into());
        }
        if !(self.discount_floor > 0.0 && self.discount_floor <= 1.0) {
            return bad(format!("discount_floor must lie in (0, 1], got {}", self.discount_floor));
        }
        if self.prices.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return bad("prices must be nonnegative".into());
        }
        BetaQuantile::new(self.init_beta[0], self.init_beta[1])?;
        BetaQuantile::new(self.spread_beta[0], self.spread_beta[1])?;
        for b in self.control_betas {
            BetaQuantile::new(self.control_alpha, b)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PestControl {
    config: PestConfig,
    space: SearchSpace,
    z0: Vec<f64>,
    // [station][trajectory]
    spread: Vec<Vec<f64>>,
    // uniforms, mapped through the current effectiveness distribution
    control_u: Vec<Vec<f64>>,
}

impl PestControl {
    pub fn new(config: PestConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(seed));
        let t = config.n_samples;
        let q0 = BetaQuantile::new(config.init_beta[0], config.init_beta[1])?;
        let qa = BetaQuantile::new(config.spread_beta[0], config.spread_beta[1])?;
        let z0 = (0..t).map(|_| q0.quantile(rng.random())).collect();
        let spread = (0..config.stations)
            .map(|_| (0..t).map(|_| qa.quantile(rng.random())).collect())
            .collect();
        let control_u = (0..config.stations)
            .map(|_| (0..t).map(|_| rng.random()).collect())
            .collect();
        let space = SearchSpace::new(vec![SubGraph::complete(N_CHOICES)?; config.stations])?;
        Ok(PestControl {
            config,
            space,
            z0,
            spread,
            control_u,
        })
    }

    pub fn config(&self) -> &PestConfig {
        &self.config
    }

    /// Price paid at each station, given the choices made before it.
    pub fn station_costs(&self, x: &[usize]) -> Result<Vec<f64>> {
        check_input(x, &vec![N_CHOICES; self.config.stations])?;
        let mut bought = [0usize; 4];
        Ok(x.iter()
            .map(|&a| {
                if a == 0 {
                    return 0.0;
                }
                let l = a - 1;
                let factor = (1.0 - self.config.discount_rate * bought[l] as f64).max(self.config.discount_floor);
                bought[l] += 1;
                self.config.prices[l] * factor
            })
            .collect())
    }

    /// `(purchase cost, infestation penalty)`, without the `lambda` term.
    pub fn breakdown(&self, x: &[usize]) -> Result<(f64, f64)> {
        let cost = self.station_costs(x)?.iter().sum();
        let cfg = &self.config;
        let mut used = [0usize; 4];
        let mut z = self.z0.clone();
        let mut penalty = 0.0;
        for (i, &a) in x.iter().enumerate() {
            let mut over = 0usize;
            if a == 0 {
                for (k, zk) in z.iter_mut().enumerate() {
                    *zk = self.spread[i][k] * (1.0 - *zk) + *zk;
                    over += usize::from(*zk > cfg.threshold);
                }
            } else {
                let l = a - 1;
                let b = cfg.control_betas[l] * (1.0 + cfg.tolerance_rate * used[l] as f64);
                let q = BetaQuantile::new(cfg.control_alpha, b)?;
                used[l] += 1;
                for (k, zk) in z.iter_mut().enumerate() {
                    let effect = q.quantile(self.control_u[i][k]);
                    *zk *= 1.0 - effect;
                    over += usize::from(*zk > cfg.threshold);
                }
            }
            penalty += cfg.rho * over as f64 / cfg.n_samples as f64;
        }
        Ok((cost, penalty))
    }

    pub fn value(&self, x: &[usize]) -> Result<f64> {
        let (cost, penalty) = self.breakdown(x)?;
        let l1 = x.iter().sum::<usize>() as f64;
        Ok(cost + penalty + self.config.lambda * l1)
    }
}

impl Objective for PestControl {
    fn name(&self) -> &str {
        "pest"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, v: &Vertex) -> Result<f64> {
        self.value(v)
    }
}
