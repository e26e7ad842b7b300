//! Brute-force verification suites on spaces small enough to materialize.

use combo_benchmarks::branin::{Branin, BraninConfig};
use combo_benchmarks::contamination::{Contamination, ContaminationConfig};
use combo_benchmarks::ising::{kl_oracle, Ising, IsingConfig};
use combo_benchmarks::synthetic::random_wcnf;
use combo_benchmarks::Objective;
use combo_benchmarks::wcnf::WcnfInstance;
use combo_core::graph::DEFAULT_ENUMERATION_CAP;
use combo_core::inference::{log_prior_horseshoe, HORSESHOE_K};
use combo_core::oracle::{brute_force_min, dense_diffusion_kernel, DenseGp};
use combo_core::surrogate::{neg_log_marginal_likelihood, predict};
use combo_core::{Dataset, GpParams, KernelFactors, SearchSpace, SubGraph, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl OracleCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        OracleCheck {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// 1 to `max_vars` complete or path sub-graphs with 2 to 4 vertices.
pub fn random_small_space<R: Rng + ?Sized>(rng: &mut R, max_vars: usize) -> Result<SearchSpace> {
    let k = rng.random_range(1..=max_vars);
    let graphs = (0..k)
        .map(|_| {
            let n = rng.random_range(2..=4);
            if rng.random::<bool>() {
                SubGraph::complete(n)
            } else {
                SubGraph::path(n)
            }
        })
        .collect::<combo_core::Result<Vec<_>>>()?;
    Ok(SearchSpace::new(graphs)?)
}

/// Largest entry-wise gap between the factor-product kernel and the kernel
/// from one eigendecomposition of the assembled product Laplacian, over
/// `n_spaces` random spaces and every vertex pair, with and without
/// normalization.
pub fn kronecker_equivalence(n_spaces: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_spaces {
        let space = random_small_space(&mut rng, 3)?;
        let betas: Vec<f64> = (0..space.n_variables()).map(|_| rng.random_range(0.0..2.0)).collect();
        let all = space.enumerate(DEFAULT_ENUMERATION_CAP)?;
        for normalize in [true, false] {
            let dense = dense_diffusion_kernel(&space, &betas, normalize);
            let factored = KernelFactors::new(&space, &betas, normalize)?.gram(&all, &all, 1.0)?;
            worst = worst.max((dense - factored).abs().max());
        }
    }
    Ok(worst)
}

/// Breadth-first distance against Hamming distance for every vertex pair.
/// Returns `(pairs checked, all-complete pairs with BFS != Hamming,
/// path-containing pairs with BFS < Hamming)`.
pub fn shortest_path_vs_hamming() -> Result<(usize, usize, usize)> {
    let mut shapes: Vec<Vec<usize>> = Vec::new();
    for k in 1..=3u32 {
        for code in 0..2usize.pow(k) {
            shapes.push((0..k as usize).map(|i| 2 + ((code >> i) & 1)).collect());
        }
    }
    let (mut pairs, mut complete_bad, mut path_bad) = (0, 0, 0);
    for sizes in &shapes {
        for path_mask in 0..1usize << sizes.len() {
            let graphs = sizes
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    if (path_mask >> i) & 1 == 1 {
                        SubGraph::path(n)
                    } else {
                        SubGraph::complete(n)
                    }
                })
                .collect::<combo_core::Result<Vec<_>>>()?;
            let space = SearchSpace::new(graphs)?;
            let all = space.enumerate(DEFAULT_ENUMERATION_CAP)?;
            for a in &all {
                for b in &all {
                    let d = space.shortest_path_oracle(a, b)?;
                    let h = a.hamming(b);
                    pairs += 1;
                    if path_mask == 0 && d != h {
                        complete_bad += 1;
                    }
                    if path_mask != 0 && d < h {
                        path_bad += 1;
                    }
                }
            }
        }
    }
    Ok((pairs, complete_bad, path_bad))
}

/// Largest gap in predictive mean, predictive variance and negative log
/// marginal likelihood between the production GP and a dense reference
/// (explicit inverse, eigenvalue log-determinant) on random instances.
pub fn gp_equivalence(n_instances: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_instances {
        let space = random_small_space(&mut rng, 3)?;
        let n_total = space.total_size() as usize;
        let n = rng.random_range(1..=n_total.min(10));
        let xs: Vec<Vertex> = (0..n).map(|_| space.random_vertex(&mut rng)).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let params = GpParams {
            mean: rng.random_range(-1.0..1.0),
            signal_variance: rng.random_range(0.2..3.0),
            noise_variance: rng.random_range(1e-3..0.5),
            betas: (0..space.n_variables()).map(|_| rng.random_range(0.0..2.0)).collect(),
        };
        let factors = KernelFactors::new(&space, &params.betas, true)?;
        let dense_k = dense_diffusion_kernel(&space, &params.betas, true);
        let dense = DenseGp {
            space: &space,
            kernel: &dense_k,
        };
        let data = Dataset::new(&space, xs.clone(), ys.clone())?;
        let nlml = neg_log_marginal_likelihood(&data, &params, &factors)?;
        worst = worst.max((nlml - dense.neg_log_marginal_likelihood(&xs, &ys, &params)).abs());
        for v in space.enumerate(DEFAULT_ENUMERATION_CAP)? {
            let a = predict(&v, &data, &params, &factors)?;
            let b = dense.predict(&xs, &ys, &params, &v);
            worst = worst.max((a.mean - b.mean).abs()).max((a.variance - b.variance).abs());
        }
    }
    Ok(worst)
}

/// Largest relative gap between the Horseshoe proxy density and
/// `K ln(1 + 2 tau^2 / x^2)` evaluated at points where that equals `K c`
/// for 20 values of `c`.
pub fn horseshoe_closed_form() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, tau) in [5.0, 0.05f64.sqrt()].into_iter().enumerate() {
        for j in 0..10 {
            let c = 0.25 * (j + 1) as f64 + 0.1 * i as f64;
            let x = tau * (2.0 / c.exp_m1()).sqrt();
            let want = HORSESHOE_K * c;
            let got = log_prior_horseshoe(x, tau)?.exp();
            worst = worst.max(((got - want) / want).abs());
        }
    }
    Ok(worst)
}

pub fn branin_grid_optimum() -> Result<(Vertex, f64)> {
    let b = Branin::new(BraninConfig::default())?;
    Ok(brute_force_min(b.space(), DEFAULT_ENUMERATION_CAP, |v| {
        b.value(v).expect("grid vertex")
    })?)
}

pub fn wmaxsat_optimum(inst: &WcnfInstance) -> Result<(Vertex, f64)> {
    let space = SearchSpace::binary(inst.n_vars)?;
    Ok(brute_force_min(&space, DEFAULT_ENUMERATION_CAP, |v| {
        inst.objective(v).expect("binary vertex")
    })?)
}

/// Synthetic 10-variable instance `i` of the small-instance suite.
pub fn small_wmaxsat(i: u64) -> Result<WcnfInstance> {
    Ok(random_wcnf(10, 40, 3, 1000 + i)?)
}

/// Largest gap between the enumerated KL and the dense log-sum-exp
/// reference on `n` random decisions.
pub fn ising_kl_gap(cfg: IsingConfig, n: usize, seed: u64) -> Result<f64> {
    let inst = Ising::new(cfg, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let x: Vec<usize> = (0..inst.edges().len()).map(|_| rng.random_range(0..2)).collect();
        worst = worst.max((inst.kl(&x)? - kl_oracle(&inst, &x)).abs());
    }
    Ok(worst)
}

/// Exhaustive minimum of the default 21-stage contamination instance.
pub fn contamination_optimum(instance_seed: u64) -> Result<(Vertex, f64)> {
    let c = Contamination::new(ContaminationConfig::default(), instance_seed)?;
    let space = SearchSpace::binary(c.config().d)?;
    Ok(brute_force_min(&space, 1 << 22, |v| c.value(v).expect("binary vertex"))?)
}

/// Everything above with fixed tolerances. `slow` adds the exhaustive
/// 21-stage contamination search.
pub fn run_suite(seed: u64, slow: bool) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    let k = kronecker_equivalence(50, seed)?;
    out.push(OracleCheck::new(
        "kronecker-kernel",
        k < 1e-8,
        format!("max abs gap {k:.3e} over 50 spaces"),
    ));
    let (pairs, cbad, pbad) = shortest_path_vs_hamming()?;
    out.push(OracleCheck::new(
        "shortest-path",
        cbad == 0 && pbad == 0,
        format!("{pairs} pairs, {cbad} complete-product mismatches, {pbad} path-product violations"),
    ));
    let g = gp_equivalence(100, seed)?;
    out.push(OracleCheck::new(
        "gp-dense",
        g < 1e-8,
        format!("max abs gap {g:.3e} over 100 instances"),
    ));
    let h = horseshoe_closed_form()?;
    out.push(OracleCheck::new(
        "horseshoe-closed-form",
        h < 1e-12,
        format!("max rel gap {h:.3e} at 20 points"),
    ));
    let (v, f) = branin_grid_optimum()?;
    out.push(OracleCheck::new(
        "branin-grid",
        f >= combo_benchmarks::branin::BRANIN_MIN,
        format!("grid optimum {f:.6} at {v}"),
    ));
    for i in 0..5 {
        let inst = small_wmaxsat(i)?;
        let (v, f) = wmaxsat_optimum(&inst)?;
        let bound: f64 = inst.normalized_weights.iter().map(|w| w.abs()).sum();
        out.push(OracleCheck::new(
            &format!("wmaxsat-{i}"),
            f.abs() <= bound,
            format!("optimum {f:.6} at {v}"),
        ));
    }
    let lambda = 1e-2;
    let ising = Ising::new(
        IsingConfig {
            lambda,
            ..IsingConfig::default()
        },
        seed,
    )?;
    let ones = ising.value(&[1; 24])?;
    let gap = ising_kl_gap(IsingConfig::default(), 20, seed)?;
    out.push(OracleCheck::new(
        "ising-kl",
        ones == 24.0 * lambda && gap < 1e-8,
        format!("all-ones value {ones}, max oracle gap {gap:.3e} on 20 inputs"),
    ));
    if slow {
        let (v, f) = contamination_optimum(seed)?;
        out.push(OracleCheck::new("contamination-21", true, format!("optimum {f:.4} at {v}")));
    }
    Ok(out)
}
