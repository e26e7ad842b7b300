//! Gaussian-process regression with a constant mean.
//!
//! The constant mean `m` enters as an offset on the targets; the covariance
//! is `sigma_f^2 K + sigma_n^2 I` with `K` the unit-signal diffusion Gram.
//! Factorizations go through Cholesky with escalating diagonal jitter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SearchSpace, Vertex};
use crate::kernel::KernelFactors;
use crate::linalg;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Jitter tried after a failed factorization, relative to the mean diagonal.
pub const JITTER_LEVELS: [f64; 3] = [1e-8, 1e-7, 1e-6];

/// One posterior sample of the GP hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpParams {
    pub mean: f64,
    pub signal_variance: f64,
    pub noise_variance: f64,
    pub betas: Vec<f64>,
}

impl GpParams {
    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::Domain(format!("mean must be finite, got {}", self.mean)));
        }
        if !(self.signal_variance > 0.0 && self.signal_variance.is_finite()) {
            return Err(Error::Domain(format!(
                "signal variance must be positive, got {}",
                self.signal_variance
            )));
        }
        if !(self.noise_variance > 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::Domain(format!(
                "noise variance must be positive, got {}",
                self.noise_variance
            )));
        }
        if let Some(b) = self.betas.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
            return Err(Error::Domain(format!("scale parameter must be >= 0, got {b}")));
        }
        Ok(())
    }
}

/// Evaluated vertices and their objective values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    vertices: Vec<Vertex>,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(space: &SearchSpace, vertices: Vec<Vertex>, values: Vec<f64>) -> Result<Self> {
        if vertices.len() != values.len() {
            return Err(Error::InvalidDataset(format!(
                "{} vertices but {} values",
                vertices.len(),
                values.len()
            )));
        }
        let mut d = Dataset::default();
        for (v, y) in vertices.into_iter().zip(values) {
            d.push(space, v, y)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, space: &SearchSpace, v: Vertex, y: f64) -> Result<()> {
        space.check(&v)?;
        if y.is_nan() {
            return Err(Error::InvalidDataset(format!("NaN objective value at {v}")));
        }
        self.vertices.push(v);
        self.values.push(y);
        Ok(())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn y_min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn y_max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn y_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Population variance of the targets.
    pub fn y_variance(&self) -> f64 {
        let m = self.y_mean();
        self.values.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / self.len() as f64
    }

    /// Lowest observed value and the first vertex attaining it.
    pub fn best(&self) -> Option<(&Vertex, f64)> {
        let mut best: Option<(&Vertex, f64)> = None;
        for (v, &y) in self.vertices.iter().zip(&self.values) {
            if best.is_none_or(|(_, b)| y < b) {
                best = Some((v, y));
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveDistribution {
    pub mean: f64,
    pub variance: f64,
}

/// Cholesky factor of an SPD matrix, row-major; only the lower triangle
/// is meaningful.
#[derive(Debug, Clone)]
pub(crate) struct SpdFactor {
    n: usize,
    lower: Vec<f64>,
}

impl SpdFactor {
    pub(crate) fn new(a: Vec<f64>, n: usize) -> Result<Self> {
        let mean_diag = (0..n).map(|i| a[i * n + i]).sum::<f64>() / n.max(1) as f64;
        let mut lower = a.clone();
        for level in std::iter::once(0.0).chain(JITTER_LEVELS) {
            let jitter = level * mean_diag;
            if level > 0.0 {
                lower.copy_from_slice(&a);
                for i in 0..n {
                    lower[i * n + i] += jitter;
                }
            }
            if linalg::cholesky_in_place(&mut lower, n) {
                if level > 0.0 {
                    log::debug!("cholesky needed jitter {jitter:e} (n = {n})");
                }
                return Ok(SpdFactor { n, lower });
            }
        }
        Err(Error::NotPositiveDefinite {
            size: n,
            jitter: JITTER_LEVELS[JITTER_LEVELS.len() - 1] * mean_diag,
        })
    }

    /// `L^{-1} b` in place.
    pub(crate) fn forward(&self, b: &mut [f64]) {
        linalg::forward(&self.lower, self.n, b);
    }

    /// `L^{-T} b` in place.
    pub(crate) fn backward(&self, b: &mut [f64]) {
        linalg::backward(&self.lower, self.n, b);
    }

    /// `A^{-1} b`.
    pub(crate) fn solve(&self, b: &mut [f64]) {
        self.forward(b);
        self.backward(b);
    }
}

/// Negative log marginal likelihood given a row-major unit-signal Gram.
pub(crate) fn nlml_from_unit_gram(
    unit_gram: &[f64],
    y: &[f64],
    mean: f64,
    signal_variance: f64,
    noise_variance: f64,
) -> Result<f64> {
    NlmlWorkspace::default().nlml(unit_gram, y, mean, signal_variance, noise_variance)
}

/// Buffers reused across likelihood evaluations of one size. The sampler
/// evaluates thousands of n-by-n likelihoods per fit, and fresh buffers
/// that large cost more in page faults than the factorization itself.
#[derive(Debug, Default)]
pub(crate) struct NlmlWorkspace {
    a: Vec<f64>,
    r: Vec<f64>,
}

impl NlmlWorkspace {
    /// Same value and jitter policy as [`SpdFactor::new`] followed by a
    /// forward solve.
    pub(crate) fn nlml(&mut self, unit_gram: &[f64], y: &[f64], mean: f64, sf2: f64, sn2: f64) -> Result<f64> {
        let n = y.len();
        let a = &mut self.a;
        let mut mean_diag = 0.0;
        let mut jitter = 0.0;
        for level in std::iter::once(0.0).chain(JITTER_LEVELS) {
            a.clear();
            a.extend(unit_gram.iter().map(|k| k * sf2));
            for i in 0..n {
                a[i * n + i] += sn2;
            }
            if level == 0.0 {
                mean_diag = (0..n).map(|i| a[i * n + i]).sum::<f64>() / n.max(1) as f64;
            }
            jitter = level * mean_diag;
            for i in 0..n {
                a[i * n + i] += jitter;
            }
            if !linalg::cholesky_in_place(a, n) {
                continue;
            }
            if level > 0.0 {
                log::debug!("cholesky needed jitter {jitter:e} (n = {n})");
            }
            let log_det = 2.0 * (0..n).map(|j| a[j * n + j].ln()).sum::<f64>();
            let r = &mut self.r;
            r.clear();
            r.extend(y.iter().map(|v| v - mean));
            linalg::forward(a, n, r);
            let quad: f64 = r.iter().map(|x| x * x).sum();
            return Ok(0.5 * quad + 0.5 * log_det + 0.5 * n as f64 * LN_2PI);
        }
        Err(Error::NotPositiveDefinite { size: n, jitter })
    }
}

/// `1/2 (y-m)^T A^{-1} (y-m) + 1/2 log det A + n/2 log 2 pi` with
/// `A = sigma_f^2 K + sigma_n^2 I`.
pub fn neg_log_marginal_likelihood(
    data: &Dataset,
    params: &GpParams,
    factors: &KernelFactors,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidDataset("marginal likelihood of an empty dataset".into()));
    }
    params.validate()?;
    for v in data.vertices() {
        factors.kernel_entry(v, v, 1.0)?;
    }
    let unit = factors.unit_gram(data.vertices());
    nlml_from_unit_gram(
        &unit,
        data.values(),
        params.mean,
        params.signal_variance,
        params.noise_variance,
    )
}

/// A GP conditioned on a dataset under one parameter sample. Factorizes the
/// training covariance once; every prediction is then `O(n^2)`.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    params: GpParams,
    factors: KernelFactors,
    // columns[i][j]: category of variable i at training vertex j
    columns: Vec<Vec<usize>>,
    // by_category[offsets[i] + a][j] = F_i[a, columns[i][j]]
    by_category: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    chol: Option<SpdFactor>,
    alpha: Vec<f64>,
}

impl GpPosterior {
    pub fn new(data: &Dataset, params: &GpParams, factors: &KernelFactors) -> Result<Self> {
        params.validate()?;
        let n = data.len();
        let p = factors.factors().len();
        for v in data.vertices() {
            factors.kernel_entry(v, v, 1.0)?;
        }
        let columns: Vec<Vec<usize>> = (0..p)
            .map(|i| data.vertices().iter().map(|v| v[i]).collect())
            .collect();
        let mut offsets = Vec::with_capacity(p);
        let mut by_category = Vec::new();
        for (f, col) in factors.factors().iter().zip(&columns) {
            offsets.push(by_category.len());
            for a in 0..f.size() {
                let row = f.row(a);
                by_category.push(col.iter().map(|&c| row[c]).collect());
            }
        }
        if n == 0 {
            return Ok(GpPosterior {
                params: params.clone(),
                factors: factors.clone(),
                columns,
                by_category,
                offsets,
                chol: None,
                alpha: Vec::new(),
            });
        }
        let mut a = factors.unit_gram(data.vertices());
        for (k, i) in a.iter_mut().zip(0..) {
            *k *= params.signal_variance;
            if i / n == i % n {
                *k += params.noise_variance;
            }
        }
        let chol = SpdFactor::new(a, n)?;
        let mut alpha: Vec<f64> = data.values().iter().map(|y| y - params.mean).collect();
        chol.solve(&mut alpha);
        Ok(GpPosterior {
            params: params.clone(),
            factors: factors.clone(),
            columns,
            by_category,
            offsets,
            chol: Some(chol),
            alpha,
        })
    }

    pub fn params(&self) -> &GpParams {
        &self.params
    }

    pub fn factors(&self) -> &KernelFactors {
        &self.factors
    }

    pub fn predict(&self, v: &Vertex) -> Result<PredictiveDistribution> {
        self.factors.kernel_entry(v, v, 1.0)?;
        Ok(self.predict_unchecked(v))
    }

    pub(crate) fn predict_unchecked(&self, v: &[usize]) -> PredictiveDistribution {
        let sf2 = self.params.signal_variance;
        let prior = sf2 * self.factors.unit_entry(v, v);
        let Some(chol) = &self.chol else {
            return PredictiveDistribution {
                mean: self.params.mean,
                variance: prior,
            };
        };
        let n = self.alpha.len();
        let mut k = vec![sf2; n];
        for (i, f) in self.factors.factors().iter().enumerate() {
            let row = f.row(v[i]);
            for (kj, &c) in k.iter_mut().zip(&self.columns[i]) {
                *kj *= row[c];
            }
        }
        let mean = self.params.mean + k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>();
        chol.forward(&mut k);
        let explained: f64 = k.iter().map(|x| x * x).sum();
        PredictiveDistribution {
            mean,
            variance: (prior - explained).max(0.0),
        }
    }

    /// Predictions for a batch of vertices with one multi-column triangular
    /// solve. Vertices must already be validated against the space.
    pub(crate) fn predict_block(&self, vs: &[&[usize]]) -> Vec<PredictiveDistribution> {
        let b = vs.len();
        let sf2 = self.params.signal_variance;
        let Some(chol) = &self.chol else {
            return vs
                .iter()
                .map(|v| PredictiveDistribution {
                    mean: self.params.mean,
                    variance: sf2 * self.factors.unit_entry(v, v),
                })
                .collect();
        };
        let n = self.alpha.len();
        // kt[q * n + j] = k(v_q, x_j)
        let mut kt = vec![sf2; b * n];
        for (row, v) in kt.chunks_exact_mut(n).zip(vs) {
            for (&off, &a) in self.offsets.iter().zip(v.iter()) {
                row.iter_mut().zip(&self.by_category[off + a]).for_each(|(x, g)| *x *= g);
            }
        }
        let mean: Vec<f64> = kt
            .chunks_exact(n)
            .map(|row| {
                row.iter()
                    .zip(&self.alpha)
                    .fold(self.params.mean, |m, (k, a)| m + k * a)
            })
            .collect();
        // w[j * b + q] = k(x_j, v_q), then overwritten by L^{-1} k
        let mut w = vec![0.0; n * b];
        for (q, row) in kt.chunks_exact(n).enumerate() {
            for (j, &k) in row.iter().enumerate() {
                w[j * b + q] = k;
            }
        }
        linalg::forward_block(&chol.lower, n, &mut w, b);
        let mut explained = vec![0.0; b];
        for j in 0..n {
            for (e, x) in explained.iter_mut().zip(&w[j * b..(j + 1) * b]) {
                *e += x * x;
            }
        }
        vs.iter()
            .zip(mean)
            .zip(explained)
            .map(|((v, mean), e)| PredictiveDistribution {
                mean,
                variance: (sf2 * self.factors.unit_entry(v, v) - e).max(0.0),
            })
            .collect()
    }
}

/// Predictive distribution at `v`; the prior `(m, sigma_f^2 K(v, v))` when
/// `data` is empty.
pub fn predict(
    v: &Vertex,
    data: &Dataset,
    params: &GpParams,
    factors: &KernelFactors,
) -> Result<PredictiveDistribution> {
    GpPosterior::new(data, params, factors)?.predict(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SubGraph;
    use crate::kernel::kernel_factors;
    use crate::oracle::{self, DenseGp};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(m: f64, sf2: f64, sn2: f64, betas: Vec<f64>) -> GpParams {
        GpParams {
            mean: m,
            signal_variance: sf2,
            noise_variance: sn2,
            betas,
        }
    }

    fn small_space() -> SearchSpace {
        SearchSpace::new(vec![
            SubGraph::complete(3).unwrap(),
            SubGraph::complete(2).unwrap(),
            SubGraph::complete(2).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn scalar_gaussian_nlml() {
        let s = SearchSpace::binary(1).unwrap();
        let kf = kernel_factors(&s, &[0.5]).unwrap();
        let d = Dataset::new(&s, vec![Vertex(vec![0])], vec![0.0]).unwrap();
        let p = params(0.0, 0.75, 0.25, vec![0.5]);
        let v = neg_log_marginal_likelihood(&d, &p, &kf).unwrap();
        assert!((v - 0.5 * LN_2PI).abs() < 1e-12);
        assert!((v - 0.918_938_533_204_672_7).abs() < 1e-12);
    }

    #[test]
    fn duplicate_vertex_nlml_matches_2x2_formula() {
        let s = SearchSpace::binary(2).unwrap();
        let kf = kernel_factors(&s, &[0.3, 0.9]).unwrap();
        let v = Vertex(vec![1, 0]);
        let d = Dataset::new(&s, vec![v.clone(), v], vec![0.0, 0.0]).unwrap();
        let (sf2, sn2) = (1.3, 0.2);
        let p = params(0.0, sf2, sn2, vec![0.3, 0.9]);
        // A = [[s+t, s], [s, s+t]]: det = t(2s + t), quadratic form zero
        let want = 0.5 * (sn2 * (2.0 * sf2 + sn2)).ln() + LN_2PI;
        let got = neg_log_marginal_likelihood(&d, &p, &kf).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn nlml_invariant_to_joint_shift() {
        let s = small_space();
        let kf = kernel_factors(&s, &[0.4, 0.8, 1.1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<Vertex> = (0..6).map(|_| s.random_vertex(&mut rng)).collect();
        let ys: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
        let d = Dataset::new(&s, xs.clone(), ys.clone()).unwrap();
        let shifted = Dataset::new(&s, xs, ys.iter().map(|y| y + 7.5).collect()).unwrap();
        let p = params(0.2, 1.0, 0.1, vec![0.4, 0.8, 1.1]);
        let q = params(7.7, 1.0, 0.1, vec![0.4, 0.8, 1.1]);
        let a = neg_log_marginal_likelihood(&d, &p, &kf).unwrap();
        let b = neg_log_marginal_likelihood(&shifted, &q, &kf).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn empty_dataset_predicts_prior() {
        let s = SearchSpace::new(vec![SubGraph::path(4).unwrap()]).unwrap();
        let kf = kernel_factors(&s, &[0.7]).unwrap();
        let p = params(1.5, 2.0, 0.1, vec![0.7]);
        let v = Vertex(vec![0]);
        let pred = predict(&v, &Dataset::default(), &p, &kf).unwrap();
        assert_eq!(pred.mean, 1.5);
        let want = 2.0 * kf.factors()[0].get(0, 0);
        assert!((pred.variance - want).abs() < 1e-14);
        assert!(neg_log_marginal_likelihood(&Dataset::default(), &p, &kf).is_err());
    }

    #[test]
    fn noiseless_interpolation() {
        let s = small_space();
        let betas = vec![0.6, 0.9, 0.4];
        let kf = kernel_factors(&s, &betas).unwrap();
        let all = s.enumerate(100).unwrap();
        let xs: Vec<Vertex> = all.iter().step_by(3).cloned().collect();
        let ys: Vec<f64> = xs.iter().map(|v| (v[0] as f64) - 0.5 * v[1] as f64 + 0.3 * v[2] as f64).collect();
        let d = Dataset::new(&s, xs.clone(), ys.clone()).unwrap();
        let p = params(0.0, 1.0, 1e-12, betas);
        let post = GpPosterior::new(&d, &p, &kf).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            let pr = post.predict(x).unwrap();
            assert!((pr.mean - y).abs() < 1e-4);
            assert!(pr.variance < 1e-4);
        }
    }

    #[test]
    fn matches_dense_oracle_on_random_instance() {
        let s = small_space();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let betas: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0)).collect();
        let kf = kernel_factors(&s, &betas).unwrap();
        let dense = oracle::dense_diffusion_kernel(&s, &betas, true);
        let gp = DenseGp { space: &s, kernel: &dense };
        let xs: Vec<Vertex> = (0..8).map(|_| s.random_vertex(&mut rng)).collect();
        let ys: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let p = params(0.3, 1.4, 0.05, betas);
        let d = Dataset::new(&s, xs.clone(), ys.clone()).unwrap();
        let post = GpPosterior::new(&d, &p, &kf).unwrap();
        for v in s.enumerate(100).unwrap() {
            let a = post.predict(&v).unwrap();
            let b = gp.predict(&xs, &ys, &p, &v);
            assert!((a.mean - b.mean).abs() < 1e-8);
            assert!((a.variance - b.variance).abs() < 1e-8);
        }
        let a = neg_log_marginal_likelihood(&d, &p, &kf).unwrap();
        let b = gp.neg_log_marginal_likelihood(&xs, &ys, &p);
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn singular_gram_recovers_with_jitter() {
        // beta huge: every factor is all-ones, the Gram has rank one.
        let s = SearchSpace::binary(3).unwrap();
        let kf = kernel_factors(&s, &[1e3; 3]).unwrap();
        let all = s.enumerate(8).unwrap();
        let d = Dataset::new(&s, all.clone(), (0..8).map(f64::from).collect()).unwrap();
        let p = params(3.5, 1.0, 1e-300, vec![1e3; 3]);
        assert!(neg_log_marginal_likelihood(&d, &p, &kf).unwrap().is_finite());
    }

    #[test]
    fn invalid_params_rejected() {
        let s = SearchSpace::binary(1).unwrap();
        let kf = kernel_factors(&s, &[0.5]).unwrap();
        let d = Dataset::new(&s, vec![Vertex(vec![0])], vec![0.0]).unwrap();
        for p in [
            params(0.0, 0.0, 0.1, vec![0.5]),
            params(0.0, 1.0, -0.1, vec![0.5]),
            params(f64::NAN, 1.0, 0.1, vec![0.5]),
        ] {
            assert!(neg_log_marginal_likelihood(&d, &p, &kf).is_err());
        }
        assert!(Dataset::new(&s, vec![Vertex(vec![0])], vec![f64::NAN]).is_err());
        assert!(Dataset::new(&s, vec![Vertex(vec![2])], vec![0.0]).is_err());
        assert!(Dataset::new(&s, vec![], vec![0.0]).is_err());
    }

    #[test]
    fn nlml_prefers_true_noise_on_prior_draws() {
        // 20 datasets drawn from the GP prior with noise 0.1: the likelihood
        // should favour the true noise over a 100x larger one.
        let s = small_space();
        let betas = vec![0.5, 0.5, 0.5];
        let kf = kernel_factors(&s, &betas).unwrap();
        let all = s.enumerate(100).unwrap();
        let truth = params(0.0, 1.0, 0.1, betas.clone());
        let wrong = params(0.0, 1.0, 10.0, betas);
        let cov = kf.gram(&all, &all, 1.0).unwrap() + nalgebra::DMatrix::identity(12, 12) * 0.1;
        let l = cov.cholesky().unwrap().unpack();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut wins = 0;
        for _ in 0..20 {
            let z = nalgebra::DVector::from_fn(12, |_, _| {
                rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
            });
            let y = &l * z;
            let d = Dataset::new(&s, all.clone(), y.iter().copied().collect()).unwrap();
            let a = neg_log_marginal_likelihood(&d, &truth, &kf).unwrap();
            let b = neg_log_marginal_likelihood(&d, &wrong, &kf).unwrap();
            if a < b {
                wins += 1;
            }
        }
        assert_eq!(wins, 20);
    }

    #[test]
    fn block_prediction_matches_single() {
        let s = small_space();
        let betas = vec![0.3, 1.2, 0.7];
        let kf = kernel_factors(&s, &betas).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<Vertex> = (0..7).map(|_| s.random_vertex(&mut rng)).collect();
        let ys: Vec<f64> = (0..7).map(|_| rng.random::<f64>()).collect();
        let d = Dataset::new(&s, xs, ys).unwrap();
        let post = GpPosterior::new(&d, &params(0.1, 0.9, 0.02, betas), &kf).unwrap();
        let all = s.enumerate(100).unwrap();
        let refs: Vec<&[usize]> = all.iter().map(|v| v.indices()).collect();
        for (v, b) in all.iter().zip(post.predict_block(&refs)) {
            let a = post.predict(v).unwrap();
            assert!((a.mean - b.mean).abs() < 1e-12);
            assert!((a.variance - b.variance).abs() < 1e-12);
        }
        let empty = GpPosterior::new(&Dataset::default(), post.params(), &kf).unwrap();
        let b = empty.predict_block(&refs[..2]);
        assert_eq!(b[0], empty.predict(&all[0]).unwrap());
    }

    proptest! {
        #[test]
        fn variance_bounded_by_prior_and_duplicates_help(
            seed in 0u64..500, n in 1usize..10,
        ) {
            let s = small_space();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let betas: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0)).collect();
            let kf = kernel_factors(&s, &betas).unwrap();
            let p = params(rng.random_range(-1.0..1.0), rng.random_range(0.1..3.0), rng.random_range(1e-3..1.0), betas);
            let xs: Vec<Vertex> = (0..n).map(|_| s.random_vertex(&mut rng)).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let d = Dataset::new(&s, xs.clone(), ys.clone()).unwrap();
            let mut dup = d.clone();
            dup.push(&s, xs[0].clone(), ys[0]).unwrap();
            let post = GpPosterior::new(&d, &p, &kf).unwrap();
            let post_dup = GpPosterior::new(&dup, &p, &kf).unwrap();
            for v in s.enumerate(100).unwrap() {
                let prior = p.signal_variance * kf.kernel_entry(&v, &v, 1.0).unwrap();
                let a = post.predict(&v).unwrap().variance;
                let b = post_dup.predict(&v).unwrap().variance;
                prop_assert!(a >= 0.0 && a <= prior + 1e-8);
                prop_assert!(b <= a + 1e-8);
            }
        }
    }
}

