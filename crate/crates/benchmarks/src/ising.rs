//! Ising sparsification: choose which couplings of a zero-field Ising model
//! to keep so the sparsified model stays close in KL divergence.
//!
//! `p(z) = exp(z^T J z) / Z` over `z in {-1, 1}^n` with `J` symmetric and
//! supported on the edges of a grid, so `z^T J z = 2 sum_e J_e z_a z_b`.
//! Decision `x_e` keeps (1) or drops (0) edge `e`. All partition functions
//! are exact sums over the `2^n` spin states.

use combo_core::{SearchSpace, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{check_binary, BenchmarkError, Objective, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsingConfig {
    pub rows: usize,
    pub cols: usize,
    pub lambda: f64,
    /// Couplings drawn uniformly from this range.
    pub coupling_range: [f64; 2],
    /// Give each coupling a random sign.
    pub random_sign: bool,
    pub seed: Option<u64>,
}

impl Default for IsingConfig {
    fn default() -> Self {
        IsingConfig {
            rows: 4,
            cols: 4,
            lambda: 0.0,
            coupling_range: [0.05, 5.0],
            random_sign: false,
            seed: None,
        }
    }
}

/// Grid edges: all horizontal edges row by row, then all vertical edges.
/// Spin `(r, c)` has index `r * cols + c`.
pub fn grid_edges(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols.saturating_sub(1) {
            e.push((r * cols + c, r * cols + c + 1));
        }
    }
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            e.push((r * cols + c, (r + 1) * cols + c));
        }
    }
    e
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone)]
pub struct Ising {
    config: IsingConfig,
    space: SearchSpace,
    edges: Vec<(usize, usize)>,
    couplings: Vec<f64>,
    // per spin state, bit e set when z_a z_b = -1 on edge e
    disagree: Vec<u64>,
    // p(z) and z^T J^p z per state
    p: Vec<f64>,
    energy_p: Vec<f64>,
    log_z_p: f64,
}

impl Ising {
    pub fn new(config: IsingConfig, seed: u64) -> Result<Self> {
        let n = config.rows * config.cols;
        if n == 0 || n > 24 {
            return Err(BenchmarkError::Config(format!(
                "exact enumeration supports 1 to 24 spins, got {n}"
            )));
        }
        let [lo, hi] = config.coupling_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(BenchmarkError::Config(format!("bad coupling range [{lo}, {hi}]")));
        }
        if !(config.lambda >= 0.0 && config.lambda.is_finite()) {
            return Err(BenchmarkError::Config("lambda must be nonnegative".into()));
        }
        let edges = grid_edges(config.rows, config.cols);
        if edges.is_empty() {
            return Err(BenchmarkError::Config("grid has no edges".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(seed));
        let couplings: Vec<f64> = edges
            .iter()
            .map(|_| {
                let j = lo + (hi - lo) * rng.random::<f64>();
                if config.random_sign && rng.random::<bool>() {
                    -j
                } else {
                    j
                }
            })
            .collect();
        let disagree: Vec<u64> = (0..1u64 << n)
            .map(|s| {
                edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| ((s >> a) ^ (s >> b)) & 1 == 1)
                    .fold(0u64, |m, (e, _)| m | (1 << e))
            })
            .collect();
        let mut inst = Ising {
            space: SearchSpace::binary(edges.len())?,
            config,
            edges,
            couplings,
            disagree,
            p: Vec::new(),
            energy_p: Vec::new(),
            log_z_p: 0.0,
        };
        let all = vec![1.0; inst.edges.len()];
        inst.energy_p = inst.energies(&all);
        inst.log_z_p = log_sum_exp(&inst.energy_p);
        inst.p = inst.energy_p.iter().map(|e| (e - inst.log_z_p).exp()).collect();
        Ok(inst)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn n_spins(&self) -> usize {
        self.config.rows * self.config.cols
    }

    /// `z^T J z` for every spin state, with coupling `e` scaled by `keep[e]`.
    fn energies(&self, keep: &[f64]) -> Vec<f64> {
        let j: Vec<f64> = self.couplings.iter().zip(keep).map(|(j, k)| 2.0 * j * k).collect();
        let total: f64 = j.iter().sum();
        self.disagree
            .iter()
            .map(|&mask| {
                let mut neg = 0.0;
                let mut m = mask;
                while m != 0 {
                    neg += j[m.trailing_zeros() as usize];
                    m &= m - 1;
                }
                total - 2.0 * neg
            })
            .collect()
    }

    /// Exact `KL(p || q)` where `q` keeps the couplings with `x_e = 1`.
    pub fn kl(&self, x: &[usize]) -> Result<f64> {
        check_binary(x, self.edges.len())?;
        let keep: Vec<f64> = x.iter().map(|&b| b as f64).collect();
        let energy_q = self.energies(&keep);
        let log_z_q = log_sum_exp(&energy_q);
        let expected: f64 = self
            .p
            .iter()
            .zip(self.energy_p.iter().zip(&energy_q))
            .map(|(p, (ep, eq))| p * (ep - eq))
            .sum();
        Ok((expected - self.log_z_p + log_z_q).max(0.0))
    }

    pub fn value(&self, x: &[usize]) -> Result<f64> {
        let kl = self.kl(x)?;
        Ok(kl + self.config.lambda * x.iter().sum::<usize>() as f64)
    }
}

impl Objective for Ising {
    fn name(&self) -> &str {
        "ising"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, v: &Vertex) -> Result<f64> {
        self.value(v)
    }
}

/// Independent reference: dense `J` matrices, explicit spin vectors, a
/// streaming log-sum-exp and `sum_z p(z) (log p(z) - log q(z))`.
pub fn kl_oracle(inst: &Ising, x: &[usize]) -> f64 {
    let n = inst.n_spins();
    let mut jp = vec![vec![0.0; n]; n];
    let mut jq = vec![vec![0.0; n]; n];
    for (e, &(a, b)) in inst.edges().iter().enumerate() {
        let j = inst.couplings()[e];
        jp[a][b] = j;
        jp[b][a] = j;
        jq[a][b] = x[e] as f64 * j;
        jq[b][a] = x[e] as f64 * j;
    }
    let quad = |j: &Vec<Vec<f64>>, z: &[f64]| -> f64 {
        (0..n).map(|a| (0..n).map(|b| z[a] * j[a][b] * z[b]).sum::<f64>()).sum()
    };
    let states: Vec<Vec<f64>> = (0..1u32 << n)
        .map(|s| (0..n).map(|i| if (s >> i) & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect();
    let ep: Vec<f64> = states.iter().map(|z| quad(&jp, z)).collect();
    let eq: Vec<f64> = states.iter().map(|z| quad(&jq, z)).collect();
    let stream = |xs: &[f64]| {
        let (mut m, mut s) = (f64::NEG_INFINITY, 0.0);
        for &x in xs {
            if x > m {
                s = s * (m - x).exp() + 1.0;
                m = x;
            } else {
                s += (x - m).exp();
            }
        }
        m + s.ln()
    };
    let (lzp, lzq) = (stream(&ep), stream(&eq));
    ep.iter()
        .zip(&eq)
        .map(|(a, b)| {
            let lp = a - lzp;
            lp.exp() * (lp - (b - lzq))
        })
        .sum()
}
