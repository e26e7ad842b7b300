//! The optimization loops: COMBO and the two baselines.

use std::collections::BTreeSet;
use std::time::Instant;

use combo_benchmarks::Objective;
use combo_core::acquisition::next_vertex;
use combo_core::inference::{fit_surrogate, SamplerState};
use combo_core::{Dataset, Error as CoreError, GpParams, SearchSpace, Vertex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::{Optimizer, RunConfig};
use crate::error::{HarnessError, Result};
use crate::seeds::{benchmark_seed, stream_rng, Stream};
use crate::trace::Trace;

/// Builds the benchmark from the config and runs the configured optimizer.
pub fn run(cfg: &RunConfig) -> Result<Trace> {
    cfg.validate()?;
    let objective = cfg.benchmark.build(benchmark_seed(cfg.seed))?;
    run_on(cfg, objective.as_ref())
}

/// Like [`run`] but against a caller-supplied objective; the benchmark
/// section of `cfg` is ignored.
pub fn run_on(cfg: &RunConfig, objective: &dyn Objective) -> Result<Trace> {
    cfg.validate()?;
    match cfg.optimizer {
        Optimizer::Combo => run_combo(cfg, objective),
        Optimizer::RandomSearch => run_random_search(cfg, objective),
        Optimizer::SimulatedAnnealing => run_simulated_annealing(cfg, objective),
    }
}

struct Clock(Option<Instant>);

impl Clock {
    fn new(enabled: bool) -> Self {
        Clock(enabled.then(Instant::now))
    }

    fn seconds(&self) -> f64 {
        self.0.map_or(0.0, |t| t.elapsed().as_secs_f64())
    }
}

fn evaluate(objective: &dyn Objective, v: &Vertex) -> Result<f64> {
    let y = objective.evaluate(v).map_err(|source| HarnessError::Evaluation {
        vertex: v.clone(),
        source,
    })?;
    if !y.is_finite() {
        return Err(HarnessError::Evaluation {
            vertex: v.clone(),
            source: combo_benchmarks::BenchmarkError::Config(format!("objective returned {y}")),
        });
    }
    Ok(y)
}

fn done(trace: &mut Trace, cfg: &RunConfig) -> bool {
    if let (Some(t), Some(b)) = (cfg.target, trace.final_best()) {
        if b <= t {
            trace.reached_target = true;
        }
    }
    trace.reached_target || trace.len() >= cfg.budget
}

/// Uniform draw of a vertex not in `seen`, or `None` when every vertex is
/// taken.
fn draw_unseen<R: Rng + ?Sized>(space: &SearchSpace, seen: &BTreeSet<Vertex>, rng: &mut R) -> Option<Vertex> {
    let total = space.total_size();
    let free = total - seen.len() as u128;
    if free == 0 {
        return None;
    }
    // rejection while at least a quarter of the space is free
    if free.saturating_mul(4) >= total {
        loop {
            let v = space.random_vertex(rng);
            if !seen.contains(&v) {
                return Some(v);
            }
        }
    }
    // small remainder: count down to the k-th free vertex by rank
    let mut k = rng.random_range(0..free as usize);
    for r in 0..total as usize {
        let v = space.unrank(r);
        if !seen.contains(&v) {
            if k == 0 {
                return Some(v);
            }
            k -= 1;
        }
    }
    unreachable!("free count is consistent with the seen set")
}

/// `n` distinct vertices drawn uniformly without replacement (all of them,
/// shuffled, when the space is no larger than `n`).
pub fn initial_design<R: Rng + ?Sized>(space: &SearchSpace, n: usize, rng: &mut R) -> Vec<Vertex> {
    if space.total_size() <= n as u128 {
        let mut all: Vec<Vertex> = (0..space.total_size() as usize).map(|r| space.unrank(r)).collect();
        all.shuffle(rng);
        return all;
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = draw_unseen(space, &seen, rng).expect("space larger than n");
        seen.insert(v.clone());
        out.push(v);
    }
    out
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn beta_medians(samples: &[GpParams]) -> Vec<f64> {
    let Some(first) = samples.first() else {
        return Vec::new();
    };
    (0..first.betas.len())
        .map(|i| median(&mut samples.iter().map(|p| p.betas[i]).collect::<Vec<_>>()))
        .collect()
}

/// Random initial design, then fit / acquire / evaluate until the budget
/// is spent.
pub fn run_combo(cfg: &RunConfig, objective: &dyn Objective) -> Result<Trace> {
    cfg.validate()?;
    let space = objective.space();
    let clock = Clock::new(cfg.record_time);
    let mut trace = Trace::new(objective.name(), Optimizer::Combo, cfg.seed);
    let mut init_rng = stream_rng(cfg.seed, Stream::InitialDesign);
    let mut acq_rng = stream_rng(cfg.seed, Stream::Acquisition);

    let mut data = Dataset::default();
    for v in initial_design(space, cfg.n_init, &mut init_rng) {
        let y = evaluate(objective, &v)?;
        data.push(space, v.clone(), y)?;
        trace.push(v, y, clock.seconds(), Vec::new());
        if done(&mut trace, cfg) {
            return Ok(trace);
        }
    }

    let mut state = SamplerState::initial(
        &data,
        space.n_variables(),
        &cfg.priors,
        stream_rng(cfg.seed, Stream::Sampler),
    )?;
    while !done(&mut trace, cfg) {
        let samples = fit_surrogate(&data, &mut state, &cfg.priors, space, &cfg.sampler)?;
        let v = match next_vertex(&data, &samples, space, &cfg.acquisition, &mut acq_rng) {
            Ok(v) => v,
            Err(CoreError::Exhausted(_)) => {
                trace.exhausted = true;
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let y = evaluate(objective, &v)?;
        data.push(space, v.clone(), y)?;
        trace.push(v, y, clock.seconds(), beta_medians(&samples));
        log::debug!(
            "{} seed {} iteration {}: value {y}, best {}",
            trace.benchmark,
            cfg.seed,
            trace.len(),
            trace.final_best().unwrap_or(y)
        );
    }
    Ok(trace)
}

/// Uniformly random unevaluated vertices. Draws from the same stream as the
/// COMBO initial design, so both start from the same points for a seed.
pub fn run_random_search(cfg: &RunConfig, objective: &dyn Objective) -> Result<Trace> {
    cfg.validate()?;
    let space = objective.space();
    let clock = Clock::new(cfg.record_time);
    let mut trace = Trace::new(objective.name(), Optimizer::RandomSearch, cfg.seed);
    let mut rng = stream_rng(cfg.seed, Stream::InitialDesign);
    let mut seen = BTreeSet::new();
    while !done(&mut trace, cfg) {
        let Some(v) = draw_unseen(space, &seen, &mut rng) else {
            trace.exhausted = true;
            break;
        };
        seen.insert(v.clone());
        let y = evaluate(objective, &v)?;
        trace.push(v, y, clock.seconds(), Vec::new());
    }
    Ok(trace)
}

/// Metropolis rule for minimization.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> bool {
    delta <= 0.0 || (temperature > 0.0 && u < (-delta / temperature).exp())
}

/// Single chain over product-graph neighbors; every proposal costs one
/// evaluation.
pub fn run_simulated_annealing(cfg: &RunConfig, objective: &dyn Objective) -> Result<Trace> {
    cfg.validate()?;
    let space = objective.space();
    let clock = Clock::new(cfg.record_time);
    let mut trace = Trace::new(objective.name(), Optimizer::SimulatedAnnealing, cfg.seed);
    let mut rng = stream_rng(cfg.seed, Stream::InitialDesign);
    let mut current = space.random_vertex(&mut rng);
    let mut f_current = evaluate(objective, &current)?;
    trace.push(current.clone(), f_current, clock.seconds(), Vec::new());
    let mut temperature = cfg.annealing.initial_temperature;
    while !done(&mut trace, cfg) {
        let nbrs = space.neighbors(&current)?;
        if nbrs.is_empty() {
            break;
        }
        let proposal = nbrs[rng.random_range(0..nbrs.len())].clone();
        let f = evaluate(objective, &proposal)?;
        trace.push(proposal.clone(), f, clock.seconds(), Vec::new());
        if metropolis_accept(f - f_current, temperature, rng.random()) {
            current = proposal;
            f_current = f;
        }
        temperature *= cfg.annealing.cooling;
    }
    Ok(trace)
}
