use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use combo_benchmarks::BenchmarkConfig;
use combo_harness::error::io_err;
use combo_harness::oracle::run_suite;
use combo_harness::{emit_summary, run, HarnessError, Optimizer, Result, RunConfig, Trace};

#[derive(Parser)]
#[command(name = "combo", version, about = "Combinatorial Bayesian optimization experiments")]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimizer on one benchmark and write its trace.
    Run(RunArgs),
    /// Aggregate saved traces into a result table and curves.
    Summarize {
        /// Glob matching trace CSV files.
        #[arg(long = "in")]
        input: String,
        /// Directory for summary.csv and curves.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force verification suites on small spaces.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run the exhaustive 2^21 contamination search.
        #[arg(long)]
        slow: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// contamination, ising, branin, pest, wmaxsat or sparse (default
    /// settings).
    #[arg(long)]
    benchmark: Option<String>,
    /// combo, random-search or simulated-annealing.
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    n_init: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stop once the best value is at or below this.
    #[arg(long)]
    target: Option<f64>,
    /// Record wall-clock seconds in the trace.
    #[arg(long)]
    time: bool,
    /// Trace CSV path; the trace goes to stdout when neither this nor the
    /// config sets one.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn missing(flag: &str) -> HarnessError {
    HarnessError::Config(format!("--{flag} is required without --config"))
}

fn build_config(a: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => {
            let bench = a.benchmark.as_deref().ok_or_else(|| missing("benchmark"))?;
            RunConfig::new(
                BenchmarkConfig::default_for(bench)?,
                Optimizer::Combo,
                a.budget.ok_or_else(|| missing("budget"))?,
                a.seed.ok_or_else(|| missing("seed"))?,
            )
        }
    };
    if let Some(b) = &a.benchmark {
        if a.config.is_some() && b != cfg.benchmark.id() {
            cfg.benchmark = BenchmarkConfig::default_for(b)?;
        }
    }
    if let Some(o) = &a.optimizer {
        cfg.optimizer = o.parse()?;
    }
    if let Some(b) = a.budget {
        cfg.budget = b;
    }
    if let Some(n) = a.n_init {
        cfg.n_init = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.target.is_some() {
        cfg.target = a.target;
    }
    if a.time {
        cfg.record_time = true;
    }
    if a.out.is_some() {
        cfg.output = a.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let cfg = build_config(a)?;
    log::info!(
        "{} on {}, budget {}, seed {}",
        cfg.optimizer,
        cfg.benchmark.id(),
        cfg.budget,
        cfg.seed
    );
    let trace = run(&cfg)?;
    match &cfg.output {
        Some(p) => {
            trace.save(p, &cfg)?;
            eprintln!(
                "{} evaluations, best {} -> {}",
                trace.len(),
                trace.final_best().unwrap_or(f64::NAN),
                p.display()
            );
        }
        None => print!("{}", trace.to_csv_string()),
    }
    Ok(())
}

fn cmd_summarize(pattern: &str, out: Option<&Path>) -> Result<()> {
    let paths = glob::glob(pattern).map_err(|e| HarnessError::Config(format!("bad glob '{pattern}': {e}")))?;
    let mut traces = Vec::new();
    for p in paths {
        let p = p.map_err(|e| HarnessError::Io {
            path: e.path().to_path_buf(),
            source: e.into(),
        })?;
        traces.push(Trace::load(&p)?);
    }
    let summary = emit_summary(&traces)?;
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Csv { path, source }
    };
    summary.write_table(std::io::stdout()).map_err(csv_err(Path::new("<stdout>")))?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let table = dir.join("summary.csv");
        let f = std::fs::File::create(&table).map_err(io_err(&table))?;
        summary.write_table(f).map_err(csv_err(&table))?;
        let curves = dir.join("curves.csv");
        let f = std::fs::File::create(&curves).map_err(io_err(&curves))?;
        summary.write_curves(f).map_err(csv_err(&curves))?;
    }
    Ok(())
}

fn cmd_oracle(seed: u64, slow: bool) -> Result<bool> {
    let checks = run_suite(seed, slow)?;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Error,
        1 => log::LevelFilter::Warn,
        2 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Summarize { input, out } => cmd_summarize(input, out.as_deref()).map(|_| true),
        Command::Oracle { seed, slow } => cmd_oracle(*seed, *slow),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
