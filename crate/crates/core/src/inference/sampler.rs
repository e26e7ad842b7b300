//! Gibbs-style sweeps of univariate slice updates over the GP parameters.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::priors::{log_prior_horseshoe, log_prior_mean, PriorConfig, SignalVariancePrior};
use super::slice::{slice_sample_univariate, SliceConfig};
use crate::error::{Error, Result};
use crate::graph::SearchSpace;
use crate::kernel::{variable_factor, Factor};
use crate::surrogate::{Dataset, GpParams, NlmlWorkspace, SpdFactor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerConfig {
    pub n_burn_in: usize,
    pub n_samples: usize,
    /// Repeat the burn-in on every call instead of only the first.
    pub burn_in_every_call: bool,
    pub beta_width: f64,
    /// Initial slice width for `ln sigma_f^2` and `ln sigma_n^2`.
    pub log_variance_width: f64,
    pub max_doublings: u32,
    pub max_shrinks: u32,
    /// Keep a log of every single-parameter update (tests only).
    pub record_updates: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            n_burn_in: 100,
            n_samples: 10,
            burn_in_every_call: false,
            beta_width: 1.0,
            log_variance_width: 1.0,
            max_doublings: 20,
            max_shrinks: 200,
            record_updates: false,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Domain("n_samples must be at least 1".into()));
        }
        for (name, w) in [("beta_width", self.beta_width), ("log_variance_width", self.log_variance_width)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {w}")));
            }
        }
        Ok(())
    }

    fn slice(&self, width: f64) -> SliceConfig {
        SliceConfig {
            width,
            max_doublings: self.max_doublings,
            max_shrinks: self.max_shrinks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Update {
    Mean,
    SignalVariance,
    NoiseVariance,
    Beta(usize),
}

#[derive(Debug, Clone)]
pub struct SamplerState {
    current: GpParams,
    rng: ChaCha8Rng,
    burned_in: bool,
    log: Vec<Update>,
}

impl SamplerState {
    pub fn new(current: GpParams, rng: ChaCha8Rng) -> Self {
        SamplerState {
            current,
            rng,
            burned_in: false,
            log: Vec::new(),
        }
    }

    /// `m = mean(y)`, `sigma_f^2 = var(y)`, `sigma_n^2 = 1e-3 var(y)`, all
    /// `beta = 1`. The signal variance is moved into its prior support on
    /// the first fit.
    pub fn initial(data: &Dataset, n_variables: usize, priors: &PriorConfig, rng: ChaCha8Rng) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidDataset("cannot initialize from an empty dataset".into()));
        }
        let var = data.y_variance();
        let scale = if var > 0.0 { var } else { priors.signal_variance_floor };
        Ok(SamplerState::new(
            GpParams {
                mean: data.y_mean(),
                signal_variance: scale,
                noise_variance: 1e-3 * scale,
                betas: vec![1.0; n_variables],
            },
            rng,
        ))
    }

    pub fn current(&self) -> &GpParams {
        &self.current
    }

    pub fn burned_in(&self) -> bool {
        self.burned_in
    }

    pub fn update_log(&self) -> &[Update] {
        &self.log
    }

    pub fn clear_update_log(&mut self) {
        self.log.clear();
    }
}

/// Per-fit cache: one n-by-n Gram per variable and their elementwise
/// product, all at unit signal variance.
struct Grams<'a> {
    space: &'a SearchSpace,
    columns: Vec<Vec<usize>>,
    per_variable: Vec<Vec<f64>>,
    unit: Vec<f64>,
    n: usize,
}

impl<'a> Grams<'a> {
    fn new(space: &'a SearchSpace, data: &Dataset, betas: &[f64]) -> Self {
        let n = data.len();
        let columns: Vec<Vec<usize>> = (0..space.n_variables())
            .map(|i| data.vertices().iter().map(|v| v[i]).collect())
            .collect();
        let mut g = Grams {
            space,
            columns,
            per_variable: Vec::new(),
            unit: Vec::new(),
            n,
        };
        g.per_variable = (0..space.n_variables()).map(|i| g.variable(i, betas[i])).collect();
        let mut unit = Vec::new();
        g.product_without(usize::MAX, &mut unit);
        g.unit = unit;
        g
    }

    fn factor(&self, i: usize, beta: f64) -> Factor {
        variable_factor(&self.space.variables()[i].eigen, beta, true)
    }

    fn variable(&self, i: usize, beta: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.fill(i, &self.factor(i, beta), None, &mut out);
        out
    }

    /// `out = others .* G_i`, or `G_i` alone when `others` is `None`.
    fn fill(&self, i: usize, f: &Factor, others: Option<&[f64]>, out: &mut Vec<f64>) {
        let col = &self.columns[i];
        out.clear();
        match others {
            None => {
                for &a in col {
                    let row = f.row(a);
                    out.extend(col.iter().map(|&b| row[b]));
                }
            }
            Some(o) => {
                for (&a, orow) in col.iter().zip(o.chunks_exact(self.n)) {
                    let row = f.row(a);
                    out.extend(col.iter().zip(orow).map(|(&b, x)| x * row[b]));
                }
            }
        }
    }

    fn product_without(&self, skip: usize, out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.n * self.n, 1.0);
        for (i, g) in self.per_variable.iter().enumerate() {
            if i != skip {
                out.iter_mut().zip(g).for_each(|(o, x)| *o *= x);
            }
        }
    }
}

const MEMO_SIZE: usize = 4;

/// Buffers shared by every update of a fit.
#[derive(Default)]
struct Scratch {
    nlml: NlmlWorkspace,
    others: Vec<f64>,
    trial: Vec<f64>,
}

fn log_likelihood(ws: &mut NlmlWorkspace, unit: &[f64], y: &[f64], m: f64, sf2: f64, sn2: f64) -> f64 {
    match ws.nlml(unit, y, m, sf2, sn2) {
        Ok(v) => -v,
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Draw `config.n_samples` parameter samples from the posterior given
/// `data`, continuing the chain held in `state`.
///
/// One sweep updates `m`, then `sigma_f^2`, then `sigma_n^2`, then every
/// `beta_i` in a freshly shuffled order. The burn-in runs on the first call
/// only unless `burn_in_every_call` is set.
pub fn fit_surrogate(
    data: &Dataset,
    state: &mut SamplerState,
    priors: &PriorConfig,
    space: &SearchSpace,
    config: &SamplerConfig,
) -> Result<Vec<GpParams>> {
    priors.validate()?;
    config.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidDataset("cannot fit a surrogate to an empty dataset".into()));
    }
    if state.current.betas.len() != space.n_variables() {
        return Err(Error::Domain(format!(
            "sampler state has {} scale parameters for {} variables",
            state.current.betas.len(),
            space.n_variables()
        )));
    }
    for v in data.vertices() {
        space.check(v)?;
    }
    state.current.validate()?;

    let mut grams = Grams::new(space, data, &state.current.betas);
    // New data can move the prior supports; pull the chain back inside.
    let p = &mut state.current;
    p.mean = if data.y_max() == data.y_min() {
        data.y_mean()
    } else {
        p.mean.clamp(data.y_min(), data.y_max())
    };
    let sv = SignalVariancePrior::from_gram(data, &grams.unit, priors.signal_variance_floor);
    p.signal_variance = sv.clamp(p.signal_variance);

    let mut scratch = Scratch::default();
    if !state.burned_in || config.burn_in_every_call {
        for _ in 0..config.n_burn_in {
            sweep(data, state, priors, config, &mut grams, &mut scratch)?;
        }
        state.burned_in = true;
    }
    let mut out = Vec::with_capacity(config.n_samples);
    for _ in 0..config.n_samples {
        sweep(data, state, priors, config, &mut grams, &mut scratch)?;
        state.current.validate()?;
        out.push(state.current.clone());
    }
    Ok(out)
}

fn sweep(
    data: &Dataset,
    state: &mut SamplerState,
    priors: &PriorConfig,
    config: &SamplerConfig,
    grams: &mut Grams<'_>,
    scratch: &mut Scratch,
) -> Result<()> {
    let y = data.values();
    let n = grams.n;
    let record = config.record_updates;

    // m: the quadratic form is quadratic in m, so one factorization serves
    // every slice evaluation.
    {
        let p = &state.current;
        let mut a: Vec<f64> = grams.unit.iter().map(|k| k * p.signal_variance).collect();
        for i in 0..n {
            a[i * n + i] += p.noise_variance;
        }
        let chol = SpdFactor::new(a, n)?;
        let mut ay = y.to_vec();
        chol.solve(&mut ay);
        let mut a1 = vec![1.0; n];
        chol.solve(&mut a1);
        let c0: f64 = y.iter().zip(&ay).map(|(a, b)| a * b).sum();
        let c1: f64 = ay.iter().sum();
        let c2: f64 = a1.iter().sum();
        if data.y_max() > data.y_min() {
            let target = |m: f64| -0.5 * (c0 - 2.0 * m * c1 + m * m * c2) + log_prior_mean(m, data);
            let width = (data.y_max() - data.y_min()) / 4.0;
            let m = slice_sample_univariate(target, p.mean, &mut state.rng, &config.slice(width))?;
            state.current.mean = m;
        }
        if record {
            state.log.push(Update::Mean);
        }
    }

    let m = state.current.mean;
    let floor = priors.signal_variance_floor;

    // sigma_f^2 in log coordinates, Jacobian included
    {
        let sv = SignalVariancePrior::from_gram(data, &grams.unit, floor);
        if let Some(v) = sv.point_mass() {
            state.current.signal_variance = v;
        } else {
            let sn2 = state.current.noise_variance;
            let unit = &grams.unit;
            let target = |u: f64| {
                let prior = sv.log_density_ln(u);
                if prior == f64::NEG_INFINITY {
                    return prior;
                }
                prior + u + log_likelihood(&mut scratch.nlml, unit, y, m, u.exp(), sn2)
            };
            let u0 = state.current.signal_variance.ln();
            let u = slice_sample_univariate(target, u0, &mut state.rng, &config.slice(config.log_variance_width))?;
            state.current.signal_variance = u.exp();
        }
        if record {
            state.log.push(Update::SignalVariance);
        }
    }

    // sigma_n^2 in log coordinates
    {
        let sf2 = state.current.signal_variance;
        let unit = &grams.unit;
        let tau = priors.tau_noise;
        let target = |u: f64| {
            let x = u.exp();
            if !(x > 0.0 && x.is_finite()) {
                return f64::NEG_INFINITY;
            }
            let prior = log_prior_horseshoe(x, tau).unwrap_or(f64::NEG_INFINITY);
            if prior == f64::NEG_INFINITY {
                return prior;
            }
            prior + u + log_likelihood(&mut scratch.nlml, unit, y, m, sf2, x)
        };
        let u0 = state.current.noise_variance.ln();
        let u = slice_sample_univariate(target, u0, &mut state.rng, &config.slice(config.log_variance_width))?;
        state.current.noise_variance = u.exp();
        if record {
            state.log.push(Update::NoiseVariance);
        }
    }

    let mut order: Vec<usize> = (0..grams.per_variable.len()).collect();
    order.shuffle(&mut state.rng);
    for i in order {
        let Scratch { nlml, others, trial } = &mut *scratch;
        grams.product_without(i, others);
        let (sf2, sn2) = (state.current.signal_variance, state.current.noise_variance);
        let tau = priors.tau_beta;

        let beta0 = state.current.betas[i];
        let unit0: Vec<f64> = others.iter().zip(&grams.per_variable[i]).map(|(a, b)| a * b).collect();
        let sv0 = SignalVariancePrior::from_gram(data, &unit0, floor);
        // sigma_f^2 can sit a rounding error outside a support recomputed
        // with a different product order.
        let degenerate = sv0.point_mass().is_some();
        if !degenerate {
            state.current.signal_variance = sv0.clamp(sf2);
        }
        let sf2 = state.current.signal_variance;
        let g = &*grams;
        let others = &*others;
        let mut memo: Vec<(Vec<u64>, f64)> = Vec::with_capacity(MEMO_SIZE);
        let target = |b: f64| {
            if !(b >= 0.0 && b.is_finite()) {
                return f64::NEG_INFINITY;
            }
            let prior = log_prior_horseshoe(b, tau).unwrap_or(f64::NEG_INFINITY);
            if prior == f64::NEG_INFINITY {
                return prior;
            }
            // Far into the tail the factor rounds to the same matrix for
            // many scales; the rest of the density then repeats exactly.
            let f = g.factor(i, b);
            let key: Vec<u64> = f.values().iter().map(|x| x.to_bits()).collect();
            if let Some((_, v)) = memo.iter().find(|(k, _)| *k == key) {
                return prior + v;
            }
            g.fill(i, &f, Some(others), trial);
            let sv_term = if degenerate {
                0.0
            } else {
                SignalVariancePrior::from_gram(data, trial, floor).log_density(sf2)
            };
            let rest = if sv_term == f64::NEG_INFINITY {
                sv_term
            } else {
                sv_term + log_likelihood(nlml, trial, y, m, sf2, sn2)
            };
            if memo.len() == MEMO_SIZE {
                memo.remove(0);
            }
            memo.push((key, rest));
            prior + rest
        };
        let beta = slice_sample_univariate(target, beta0, &mut state.rng, &config.slice(config.beta_width))?;

        state.current.betas[i] = beta;
        let mut pv = std::mem::take(&mut grams.per_variable[i]);
        grams.fill(i, &grams.factor(i, beta), None, &mut pv);
        grams.per_variable[i] = pv;
        let mut unit = std::mem::take(&mut grams.unit);
        unit.clear();
        unit.extend(others.iter().zip(&grams.per_variable[i]).map(|(a, b)| a * b));
        grams.unit = unit;
        if degenerate {
            let sv = SignalVariancePrior::from_gram(data, &grams.unit, floor);
            state.current.signal_variance = sv.clamp(state.current.signal_variance);
        }
        if record {
            state.log.push(Update::Beta(i));
        }
    }
    Ok(())
}
