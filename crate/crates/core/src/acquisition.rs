//! Expected improvement over posterior samples and its maximization on the
//! product graph.
//!
//! Maximization scores a pool of uniform random vertices plus "spray"
//! vertices near the incumbent, then runs greedy breadth-first local search
//! (BFLS) from the best few. Ties anywhere are broken towards the
//! lexicographically smallest vertex.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{SearchSpace, Vertex};
use crate::kernel::KernelFactors;
use crate::surrogate::{Dataset, GpParams, GpPosterior, PredictiveDistribution};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const BLOCK: usize = 64;

/// How per-sample EI values are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Mean,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcquisitionConfig {
    pub n_random_candidates: usize,
    pub n_spray: usize,
    pub spray_radius: usize,
    pub n_bfls_starts: usize,
    pub aggregation: Aggregation,
    pub execution: Execution,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        AcquisitionConfig {
            n_random_candidates: 20_000,
            n_spray: 20,
            spray_radius: 2,
            n_bfls_starts: 20,
            aggregation: Aggregation::Mean,
            execution: Execution::Parallel,
        }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_random_candidates == 0 || self.n_spray == 0 || self.spray_radius == 0 || self.n_bfls_starts == 0 {
            return Err(Error::Domain("acquisition counts must all be positive".into()));
        }
        if self.n_bfls_starts > self.n_random_candidates + self.n_spray {
            return Err(Error::Domain(format!(
                "{} local-search starts but only {} candidates",
                self.n_bfls_starts,
                self.n_random_candidates + self.n_spray
            )));
        }
        Ok(())
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// EI for minimization: `(y* - mu) Phi(z) + sigma phi(z)` with
/// `z = (y* - mu) / sigma`; `max(y* - mu, 0)` when `sigma = 0`.
pub fn expected_improvement(pred: PredictiveDistribution, y_best: f64) -> f64 {
    let sigma = pred.variance.max(0.0).sqrt();
    let gap = y_best - pred.mean;
    if sigma == 0.0 {
        return gap.max(0.0);
    }
    let z = gap / sigma;
    let ei = gap * std_normal_cdf(z) + sigma * FRAC_1_SQRT_2PI * (-0.5 * z * z).exp();
    ei.max(0.0)
}

/// EI marginalized over posterior samples. Holds one factorized GP per
/// sample, so repeated evaluations cost `O(n^2)` each.
#[derive(Debug, Clone)]
pub struct AcquisitionFunction<'a> {
    space: &'a SearchSpace,
    posteriors: Vec<GpPosterior>,
    y_best: f64,
    aggregation: Aggregation,
}

impl<'a> AcquisitionFunction<'a> {
    pub fn new(
        space: &'a SearchSpace,
        data: &Dataset,
        samples: &[GpParams],
        aggregation: Aggregation,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("acquisition needs at least one posterior sample".into()));
        }
        if data.is_empty() {
            return Err(Error::InvalidDataset("acquisition needs at least one observation".into()));
        }
        let posteriors = samples
            .iter()
            .map(|p| {
                let factors = KernelFactors::new(space, &p.betas, true)?;
                GpPosterior::new(data, p, &factors)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AcquisitionFunction {
            space,
            posteriors,
            y_best: data.y_min(),
            aggregation,
        })
    }

    pub fn y_best(&self) -> f64 {
        self.y_best
    }

    fn combine(&self, eis: impl Iterator<Item = f64>) -> f64 {
        match self.aggregation {
            Aggregation::Mean => eis.sum::<f64>() / self.posteriors.len() as f64,
            Aggregation::Max => eis.fold(0.0, f64::max),
        }
    }

    pub fn value(&self, v: &Vertex) -> Result<f64> {
        self.space.check(v)?;
        Ok(self.combine(
            self.posteriors
                .iter()
                .map(|p| expected_improvement(p.predict_unchecked(v), self.y_best)),
        ))
    }

    /// Values for many vertices, scored in fixed-size blocks. The block
    /// layout does not depend on `exec`, so both policies agree bit for bit.
    pub fn values(&self, vs: &[Vertex], exec: Execution) -> Result<Vec<f64>> {
        for v in vs {
            self.space.check(v)?;
        }
        let blocks: Vec<&[Vertex]> = vs.chunks(BLOCK).collect();
        let scored = exec.map(&blocks, |block| self.block_values(block));
        Ok(scored.into_iter().flatten().collect())
    }

    fn block_values(&self, block: &[Vertex]) -> Vec<f64> {
        let refs: Vec<&[usize]> = block.iter().map(|v| v.indices()).collect();
        let per_sample: Vec<Vec<PredictiveDistribution>> =
            self.posteriors.iter().map(|p| p.predict_block(&refs)).collect();
        (0..block.len())
            .map(|q| {
                self.combine(
                    per_sample
                        .iter()
                        .map(|preds| expected_improvement(preds[q], self.y_best)),
                )
            })
            .collect()
    }
}

/// Mean (or max) EI at `v` over `samples`, with `y* = min(y)`.
pub fn acquisition_value(
    v: &Vertex,
    data: &Dataset,
    samples: &[GpParams],
    space: &SearchSpace,
) -> Result<f64> {
    AcquisitionFunction::new(space, data, samples, Aggregation::Mean)?.value(v)
}

/// `count` vertices near `v_best`: pick a radius `r` in `1..=radius`, pick
/// `r` distinct variables that have more than one category, move each to a
/// different category uniformly at random.
pub fn spray_vertices<R: Rng + ?Sized>(
    v_best: &Vertex,
    space: &SearchSpace,
    radius: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vertex>> {
    space.check(v_best)?;
    let sizes = space.sizes();
    let movable: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] > 1).collect();
    if radius == 0 || movable.is_empty() {
        return Ok(vec![v_best.clone(); count]);
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let r = rng.random_range(1..=radius).min(movable.len());
        let mut v = v_best.clone();
        for k in index::sample(rng, movable.len(), r) {
            let i = movable[k];
            let c = rng.random_range(0..sizes[i] - 1);
            v.0[i] = if c >= v_best[i] { c + 1 } else { c };
        }
        out.push(v);
    }
    Ok(out)
}

/// Greedy ascent: move to the best neighbour while it strictly improves.
/// Returns the local maximum and its value.
pub fn bfls<F>(start: &Vertex, mut acq: F, space: &SearchSpace) -> Result<(Vertex, f64)>
where
    F: FnMut(&Vertex) -> f64,
{
    space.check(start)?;
    let v0 = acq(start);
    Ok(ascend(start.clone(), v0, |vs| vs.iter().map(&mut acq).collect(), space))
}

fn ascend<F>(mut current: Vertex, mut value: f64, mut score: F, space: &SearchSpace) -> (Vertex, f64)
where
    F: FnMut(&[Vertex]) -> Vec<f64>,
{
    loop {
        let nbrs = space.neighbors_unchecked(&current);
        let vals = score(&nbrs);
        let best = nbrs
            .into_iter()
            .zip(vals)
            .filter(|(_, a)| *a > value)
            .min_by(|(va, a), (vb, b)| b.total_cmp(a).then_with(|| va.cmp(vb)));
        match best {
            Some((v, a)) => {
                current = v;
                value = a;
            }
            None => return (current, value),
        }
    }
}

/// Next vertex to evaluate: the highest-EI vertex seen during candidate
/// scoring and local search that is not already in `data`.
pub fn next_vertex<R: Rng + ?Sized>(
    data: &Dataset,
    samples: &[GpParams],
    space: &SearchSpace,
    config: &AcquisitionConfig,
    rng: &mut R,
) -> Result<Vertex> {
    config.validate()?;
    let evaluated: HashSet<&Vertex> = data.vertices().iter().collect();
    let total = space.total_size();
    if evaluated.len() as u128 >= total {
        return Err(Error::Exhausted(total));
    }
    let acq = AcquisitionFunction::new(space, data, samples, config.aggregation)?;

    let pool = (config.n_random_candidates + config.n_spray) as u128;
    let mut candidates: Vec<Vertex> = if total <= pool {
        space.enumerate(total)?
    } else {
        let (best, _) = data.best().expect("nonempty dataset");
        let mut c: Vec<Vertex> = (0..config.n_random_candidates)
            .map(|_| space.random_vertex(rng))
            .collect();
        c.extend(spray_vertices(best, space, config.spray_radius, config.n_spray, rng)?);
        c
    };
    candidates.sort();
    candidates.dedup();
    let scores = acq.values(&candidates, config.execution)?;

    let mut explored: BTreeMap<Vertex, f64> = candidates.into_iter().zip(scores).collect();
    let mut ranked: Vec<(&Vertex, f64)> = explored.iter().map(|(v, a)| (v, *a)).collect();
    ranked.sort_by(|(va, a), (vb, b)| b.total_cmp(a).then_with(|| va.cmp(vb)));
    let starts: Vec<(Vertex, f64)> = ranked
        .into_iter()
        .take(config.n_bfls_starts)
        .map(|(v, a)| (v.clone(), a))
        .collect();

    for (start, value) in starts {
        let score = |vs: &[Vertex]| -> Vec<f64> {
            let fresh: Vec<Vertex> = vs.iter().filter(|v| !explored.contains_key(*v)).cloned().collect();
            // neighbours come from the space, so they are valid
            let new_vals = acq.values(&fresh, config.execution).expect("valid neighbours");
            for (v, a) in fresh.into_iter().zip(new_vals) {
                explored.insert(v, a);
            }
            vs.iter().map(|v| explored[v]).collect()
        };
        ascend(start, value, score, space);
    }

    let best = explored
        .iter()
        .filter(|(v, _)| !evaluated.contains(v))
        .min_by(|(va, a), (vb, b)| b.total_cmp(a).then_with(|| va.cmp(vb)));
    if let Some((v, _)) = best {
        return Ok(v.clone());
    }
    random_unevaluated(space, &evaluated, rng)
}

fn random_unevaluated<R: Rng + ?Sized>(
    space: &SearchSpace,
    evaluated: &HashSet<&Vertex>,
    rng: &mut R,
) -> Result<Vertex> {
    let total = space.total_size();
    if total <= crate::graph::DEFAULT_ENUMERATION_CAP {
        let open: Vec<Vertex> = space
            .enumerate(total)?
            .into_iter()
            .filter(|v| !evaluated.contains(v))
            .collect();
        if open.is_empty() {
            return Err(Error::Exhausted(total));
        }
        return Ok(open[rng.random_range(0..open.len())].clone());
    }
    // the space dwarfs any dataset, so rejection terminates quickly
    loop {
        let v = space.random_vertex(rng);
        if !evaluated.contains(&v) {
            return Ok(v);
        }
    }
}
