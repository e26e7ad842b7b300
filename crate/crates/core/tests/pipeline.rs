use combo_core::acquisition::{expected_improvement, next_vertex, AcquisitionConfig, AcquisitionFunction, Aggregation};
use combo_core::exec::Execution;
use combo_core::inference::{fit_surrogate, PriorConfig, SamplerConfig, SamplerState};
use combo_core::oracle::{dense_diffusion_kernel, DenseGp};
use combo_core::surrogate::{neg_log_marginal_likelihood, predict};
use combo_core::{Dataset, Error, GpParams, KernelFactors, SearchSpace, SubGraph, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mixed_space() -> SearchSpace {
    SearchSpace::new(vec![
        SubGraph::complete(3).unwrap(),
        SubGraph::path(4).unwrap(),
        SubGraph::complete(2).unwrap(),
        SubGraph::complete(3).unwrap(),
    ])
    .unwrap()
}

fn random_data(space: &SearchSpace, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Vertex> = (0..n).map(|_| space.random_vertex(&mut rng)).collect();
    let ys = xs
        .iter()
        .map(|v| v[0] as f64 - 0.4 * v[1] as f64 + 0.3 * rng.random::<f64>())
        .collect();
    Dataset::new(space, xs, ys).unwrap()
}

fn params() -> GpParams {
    GpParams {
        mean: 0.2,
        signal_variance: 1.3,
        noise_variance: 0.05,
        betas: vec![0.4, 0.9, 0.2, 1.5],
    }
}

// 150 points with repeats on a 72-vertex space: the factorization crosses
// many block boundaries and the Gram is far from diagonal.
#[test]
fn factored_gp_matches_dense_route_at_size() {
    let s = mixed_space();
    let d = random_data(&s, 150, 1);
    let p = params();
    let kf = KernelFactors::new(&s, &p.betas, true).unwrap();
    let dense = dense_diffusion_kernel(&s, &p.betas, true);
    let gp = DenseGp { space: &s, kernel: &dense };

    let a = neg_log_marginal_likelihood(&d, &p, &kf).unwrap();
    let b = gp.neg_log_marginal_likelihood(d.vertices(), d.values(), &p);
    assert!((a - b).abs() < 1e-7 * b.abs().max(1.0), "{a} vs {b}");

    let all = s.enumerate(72).unwrap();
    for v in &all {
        let x = predict(v, &d, &p, &kf).unwrap();
        let y = gp.predict(d.vertices(), d.values(), &p, v);
        assert!((x.mean - y.mean).abs() < 1e-8);
        assert!((x.variance - y.variance).abs() < 1e-8);
    }

    // batched scoring goes through the blocked solve
    let acq = AcquisitionFunction::new(&s, &d, std::slice::from_ref(&p), Aggregation::Mean).unwrap();
    let batch = acq.values(&all, Execution::Sequential).unwrap();
    for (v, got) in all.iter().zip(batch) {
        let want = expected_improvement(gp.predict(d.vertices(), d.values(), &p, v), d.y_min());
        assert!((got - want).abs() < 1e-8, "{v}: {got} vs {want}");
    }
}

fn ramp(v: &Vertex) -> f64 {
    v.iter().map(|&c| c as f64).sum()
}

fn optimize(seed: u64, budget: usize) -> Vec<Vertex> {
    let s = SearchSpace::new(vec![SubGraph::path(3).unwrap(); 4]).unwrap();
    let best = Vertex(vec![0; 4]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = Dataset::default();
    while d.len() < 6 {
        let v = s.random_vertex(&mut rng);
        if !d.vertices().contains(&v) && v != best {
            let y = ramp(&v);
            d.push(&s, v, y).unwrap();
        }
    }
    let priors = PriorConfig::default();
    let sampler = SamplerConfig {
        n_burn_in: 30,
        ..SamplerConfig::default()
    };
    let mut state = SamplerState::initial(&d, 4, &priors, ChaCha8Rng::seed_from_u64(seed + 100)).unwrap();
    while d.len() < budget {
        let samples = fit_surrogate(&d, &mut state, &priors, &s, &sampler).unwrap();
        let v = next_vertex(&d, &samples, &s, &AcquisitionConfig::default(), &mut rng).unwrap();
        let y = ramp(&v);
        d.push(&s, v, y).unwrap();
        if y == 0.0 {
            break;
        }
    }
    d.vertices().to_vec()
}

// Random search needs about 44 evaluations on average to hit the corner.
#[test]
fn loop_walks_down_a_ramp() {
    for seed in 0..10 {
        let xs = optimize(seed, 20);
        assert_eq!(xs.last().unwrap(), &Vertex(vec![0; 4]), "seed {seed}");
        let mut sorted = xs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), xs.len(), "a vertex was proposed twice");
    }
    assert_eq!(optimize(7, 12), optimize(7, 12));
}

#[test]
fn full_dataset_reports_exhaustion() {
    let s = SearchSpace::binary(2).unwrap();
    let xs = s.enumerate(4).unwrap();
    let d = Dataset::new(&s, xs, vec![1.0, 0.0, 2.0, 3.0]).unwrap();
    let mut state = SamplerState::initial(&d, 2, &PriorConfig::default(), ChaCha8Rng::seed_from_u64(0)).unwrap();
    let cfg = SamplerConfig {
        n_burn_in: 5,
        ..SamplerConfig::default()
    };
    let samples = fit_surrogate(&d, &mut state, &PriorConfig::default(), &s, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(matches!(
        next_vertex(&d, &samples, &s, &AcquisitionConfig::default(), &mut rng),
        Err(Error::Exhausted(4))
    ));
}
