use std::path::Path;
use std::process::{Command, Output};

fn combo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combo"))
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, name: &str, optimizer: &str, seed: &str) -> String {
    let out = dir.join(name);
    let o = combo(&[
        "run",
        "--benchmark",
        "sparse",
        "--optimizer",
        optimizer,
        "--budget",
        "12",
        "--n-init",
        "5",
        "--seed",
        seed,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn run_is_reproducible_and_writes_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to(dir.path(), "a.csv", "combo", "3");
    let b = run_to(dir.path(), "b.csv", "combo", "3");
    assert_eq!(a, b);
    assert!(a.starts_with("iteration,vertex,value,best_so_far,seconds,beta_medians\n"));
    assert_eq!(a.lines().count(), 13);
    let meta = std::fs::read_to_string(dir.path().join("a.meta.toml")).unwrap();
    assert!(meta.contains("optimizer = \"combo\""));
    assert!(meta.contains("[config.benchmark]"));
}

#[test]
fn config_file_round_trip_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    run_to(dir.path(), "a.csv", "random-search", "1");
    // the sidecar's config section is itself a valid run config
    let meta: toml::Table = toml::from_str(&std::fs::read_to_string(dir.path().join("a.meta.toml")).unwrap()).unwrap();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(&cfg_path, toml::to_string(&meta["config"]).unwrap()).unwrap();
    let out = dir.path().join("b.csv");
    let o = combo(&["run", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        std::fs::read_to_string(dir.path().join("a.csv")).unwrap()
    );
    let short = dir.path().join("c.csv");
    let o = combo(&[
        "run",
        "--config",
        cfg_path.to_str().unwrap(),
        "--budget",
        "7",
        "--out",
        short.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&short).unwrap().lines().count(), 8);
}

#[test]
fn bad_inputs_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "budget = 10\nseed = 1\nbugdet = 3\n[benchmark]\nkind = \"branin\"\n").unwrap();
    let o = combo(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bugdet"));

    let o = combo(&["run", "--benchmark", "branin", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));

    let o = combo(&["run", "--benchmark", "nas", "--budget", "10", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn summarize_over_a_glob() {
    let dir = tempfile::tempdir().unwrap();
    for s in ["1", "2", "3"] {
        run_to(dir.path(), &format!("rs_{s}.csv"), "random-search", s);
        run_to(dir.path(), &format!("sa_{s}.csv"), "simulated-annealing", s);
    }
    let pattern = dir.path().join("*.csv");
    let out = dir.path().join("summary");
    let o = combo(&["summarize", "--in", pattern.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), table);
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("sparse,random-search,3,"));
    assert!(rows[2].starts_with("sparse,simulated-annealing,3,"));
    let curves = std::fs::read_to_string(out.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 1 + 2 * 12);

    let none = dir.path().join("*.nothing");
    assert_eq!(combo(&["summarize", "--in", none.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn oracle_suite_passes() {
    let o = combo(&["oracle"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    assert!(text.contains("kronecker-kernel"));
}
