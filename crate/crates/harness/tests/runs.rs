use std::collections::BTreeSet;

use combo_benchmarks::synthetic::SparseConfig;
use combo_benchmarks::{BenchmarkConfig, BenchmarkError, Objective};
use combo_core::{SearchSpace, Vertex};
use combo_harness::{run, run_on, HarnessError, Optimizer, RunConfig, Trace};

/// Table lookup on a tiny space.
struct Table {
    space: SearchSpace,
    values: Vec<f64>,
    poison: Option<Vertex>,
}

impl Table {
    fn k2_by_k2() -> Self {
        Table {
            space: SearchSpace::binary(2).unwrap(),
            values: vec![3.0, 1.0, 4.0, -2.0],
            poison: None,
        }
    }
}

impl Objective for Table {
    fn name(&self) -> &str {
        "table"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, v: &Vertex) -> Result<f64, BenchmarkError> {
        if self.poison.as_ref() == Some(v) {
            return Err(BenchmarkError::Config("poisoned".into()));
        }
        Ok(self.values[self.space.rank(v).unwrap()])
    }
}

fn sparse_cfg(optimizer: Optimizer, budget: usize, seed: u64) -> RunConfig {
    let mut c = RunConfig::new(BenchmarkConfig::Sparse(SparseConfig::default()), optimizer, budget, seed);
    c.n_init = 5;
    c.sampler.n_burn_in = 20;
    c.acquisition.n_bfls_starts = 5;
    c
}

fn check_monotone(t: &Trace) {
    for (i, w) in t.records.windows(2).enumerate() {
        assert!(w[1].best_so_far <= w[0].best_so_far, "record {i}");
        assert_eq!(w[1].iteration, w[0].iteration + 1);
    }
    for r in &t.records {
        let min = t.records[..r.iteration].iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_so_far, min);
    }
}

#[test]
fn one_model_driven_step_after_the_design() {
    let c = sparse_cfg(Optimizer::Combo, 6, 1);
    let t = run(&c).unwrap();
    assert_eq!(t.len(), 6);
    let modelled: Vec<bool> = t.records.iter().map(|r| !r.beta_medians.is_empty()).collect();
    assert_eq!(modelled, vec![false, false, false, false, false, true]);
    assert_eq!(t.records[5].beta_medians.len(), 10);
}

#[test]
fn combo_traces_are_byte_identical_and_never_repeat_a_vertex() {
    let c = sparse_cfg(Optimizer::Combo, 30, 4);
    let a = run(&c).unwrap();
    let b = run(&c).unwrap();
    assert_eq!(a.to_csv_string(), b.to_csv_string());
    let distinct: BTreeSet<&Vertex> = a.records.iter().map(|r| &r.vertex).collect();
    assert_eq!(distinct.len(), a.len());
    check_monotone(&a);
    let other = run(&sparse_cfg(Optimizer::Combo, 30, 5)).unwrap();
    assert_ne!(a.to_csv_string(), other.to_csv_string());
}

#[test]
fn combo_exhausts_a_four_vertex_space() {
    let obj = Table::k2_by_k2();
    let mut c = RunConfig::new(BenchmarkConfig::default_for("sparse").unwrap(), Optimizer::Combo, 4, 0);
    c.n_init = 2;
    let t = run_on(&c, &obj).unwrap();
    assert_eq!(t.len(), 4);
    assert_eq!(t.final_best(), Some(-2.0));
    assert_eq!(t.records.iter().map(|r| &r.vertex).collect::<BTreeSet<_>>().len(), 4);

    c.budget = 6;
    let t = run_on(&c, &obj).unwrap();
    assert_eq!(t.len(), 4);
    assert!(t.exhausted);
}

#[test]
fn random_search_contract() {
    let obj = Table::k2_by_k2();
    let mut c = RunConfig::new(BenchmarkConfig::default_for("sparse").unwrap(), Optimizer::RandomSearch, 4, 3);
    c.n_init = 1;
    let t = run_on(&c, &obj).unwrap();
    assert_eq!(t.final_best(), Some(-2.0));
    assert!(!t.exhausted);
    c.budget = 9;
    assert!(run_on(&c, &obj).unwrap().exhausted);

    let c = sparse_cfg(Optimizer::RandomSearch, 60, 2);
    let a = run(&c).unwrap();
    check_monotone(&a);
    assert_eq!(a, run(&c).unwrap());
    let distinct: BTreeSet<&Vertex> = a.records.iter().map(|r| &r.vertex).collect();
    assert_eq!(distinct.len(), 60);
}

#[test]
fn random_search_starts_from_the_combo_design() {
    let combo = run(&sparse_cfg(Optimizer::Combo, 6, 8)).unwrap();
    let rs = run(&sparse_cfg(Optimizer::RandomSearch, 6, 8)).unwrap();
    for i in 0..5 {
        assert_eq!(combo.records[i].vertex, rs.records[i].vertex);
    }
}

/// Replays the chain under the hill-climbing rule and checks that every
/// proposal is a neighbor of the replayed current vertex.
fn follows_hill_climbing(t: &Trace) -> bool {
    let mut cur = &t.records[0];
    for r in &t.records[1..] {
        if r.vertex.hamming(&cur.vertex) != 1 {
            return false;
        }
        if r.value <= cur.value {
            cur = r;
        }
    }
    true
}

#[test]
fn annealing_at_zero_temperature_is_hill_climbing() {
    let mut c = sparse_cfg(Optimizer::SimulatedAnnealing, 80, 6);
    c.annealing.initial_temperature = 0.0;
    let t = run(&c).unwrap();
    check_monotone(&t);
    assert!(follows_hill_climbing(&t));
    assert_eq!(t, run(&c).unwrap());

    // a hot chain does accept uphill moves
    c.annealing.initial_temperature = 100.0;
    c.annealing.cooling = 1.0;
    assert!(!follows_hill_climbing(&run(&c).unwrap()));
}

#[test]
fn target_stops_early() {
    let obj = Table::k2_by_k2();
    let mut c = RunConfig::new(BenchmarkConfig::default_for("sparse").unwrap(), Optimizer::RandomSearch, 4, 0);
    c.n_init = 1;
    c.target = Some(-2.0);
    let t = run_on(&c, &obj).unwrap();
    assert!(t.reached_target);
    assert_eq!(t.records.last().unwrap().value, -2.0);
}

#[test]
fn evaluation_errors_name_the_vertex() {
    let mut obj = Table::k2_by_k2();
    obj.poison = Some(Vertex(vec![1, 1]));
    let mut c = RunConfig::new(BenchmarkConfig::default_for("sparse").unwrap(), Optimizer::RandomSearch, 4, 0);
    c.n_init = 1;
    match run_on(&c, &obj) {
        Err(HarnessError::Evaluation { vertex, .. }) => assert_eq!(vertex, Vertex(vec![1, 1])),
        other => panic!("{other:?}"),
    }
}
