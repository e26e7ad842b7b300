//! Per-evaluation traces, stored as CSV with a TOML metadata sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use combo_core::Vertex;
use serde::{Deserialize, Serialize};

use crate::config::{Optimizer, RunConfig};
use crate::error::{io_err, HarnessError, Result};

pub const CSV_HEADER: [&str; 6] = ["iteration", "vertex", "value", "best_so_far", "seconds", "beta_medians"];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 1-based evaluation count.
    pub iteration: usize,
    pub vertex: Vertex,
    pub value: f64,
    pub best_so_far: f64,
    pub seconds: f64,
    /// Median of each `beta_i` over the posterior samples that chose this
    /// vertex; empty for evaluations not driven by a model.
    pub beta_medians: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub benchmark: String,
    pub optimizer: Optimizer,
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    /// Every vertex was evaluated before the budget ran out.
    pub exhausted: bool,
    pub reached_target: bool,
}

impl Trace {
    pub fn new(benchmark: impl Into<String>, optimizer: Optimizer, seed: u64) -> Self {
        Trace {
            benchmark: benchmark.into(),
            optimizer,
            seed,
            records: Vec::new(),
            exhausted: false,
            reached_target: false,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn push(&mut self, vertex: Vertex, value: f64, seconds: f64, beta_medians: Vec<f64>) {
        let best_so_far = self.final_best().map_or(value, |b| b.min(value));
        self.records.push(TraceRecord {
            iteration: self.records.len() + 1,
            vertex,
            value,
            best_so_far,
            seconds,
            beta_medians,
        });
    }

    pub fn final_best(&self) -> Option<f64> {
        self.records.last().map(|r| r.best_so_far)
    }

    /// First vertex attaining the final best value.
    pub fn best_vertex(&self) -> Option<&Vertex> {
        let best = self.final_best()?;
        self.records.iter().find(|r| r.value == best).map(|r| &r.vertex)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.records {
            out.write_record([
                r.iteration.to_string(),
                r.vertex.to_string(),
                r.value.to_string(),
                r.best_so_far.to_string(),
                r.seconds.to_string(),
                join(&r.beta_medians),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Writes `path` and its metadata sidecar.
    pub fn save(&self, path: &Path, config: &RunConfig) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let file = std::fs::File::create(path).map_err(io_err(path))?;
        self.write_csv(file).map_err(|source| HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let meta = RunMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            benchmark: self.benchmark.clone(),
            optimizer: self.optimizer,
            seed: self.seed,
            evaluations: self.len(),
            exhausted: self.exhausted,
            reached_target: self.reached_target,
            final_best: self.final_best(),
            config: config.clone(),
        };
        let mp = meta_path(path);
        std::fs::write(&mp, toml::to_string(&meta).expect("metadata serializes")).map_err(io_err(&mp))
    }

    /// Reads a trace written by [`Trace::save`].
    pub fn load(path: &Path) -> Result<Trace> {
        let mp = meta_path(path);
        let text = std::fs::read_to_string(&mp).map_err(io_err(&mp))?;
        let meta: RunMeta = toml::from_str(&text).map_err(|e| HarnessError::Trace {
            path: mp.clone(),
            message: e.to_string(),
        })?;
        Ok(Trace {
            benchmark: meta.benchmark,
            optimizer: meta.optimizer,
            seed: meta.seed,
            records: read_records(path)?,
            exhausted: meta.exhausted,
            reached_target: meta.reached_target,
        })
    }
}

/// Contents of the `.meta.toml` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunMeta {
    pub version: String,
    pub benchmark: String,
    pub optimizer: Optimizer,
    pub seed: u64,
    pub evaluations: usize,
    pub exhausted: bool,
    pub reached_target: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_best: Option<f64>,
    pub config: RunConfig,
}

/// `runs/a.csv` -> `runs/a.meta.toml`.
pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.toml")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn split<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(';').map(|t| t.parse().ok()).collect()
}

pub fn read_records(path: &Path) -> Result<Vec<TraceRecord>> {
    let bad = |message: String| HarnessError::Trace {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(|source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let header = rdr
        .headers()
        .map_err(|source| HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut records = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|source| HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let line = row + 2;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| bad(format!("line {line}: bad {} '{}'", CSV_HEADER[i], &rec[i])))
        };
        records.push(TraceRecord {
            iteration: rec[0]
                .parse()
                .map_err(|_| bad(format!("line {line}: bad iteration '{}'", &rec[0])))?,
            vertex: Vertex(split(&rec[1]).ok_or_else(|| bad(format!("line {line}: bad vertex '{}'", &rec[1])))?),
            value: num(2)?,
            best_so_far: num(3)?,
            seconds: num(4)?,
            beta_medians: split(&rec[5]).ok_or_else(|| bad(format!("line {line}: bad beta medians")))?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trace {
        let mut t = Trace::new("branin", Optimizer::Combo, 5);
        t.push(Vertex(vec![1, 2]), 3.5, 0.0, vec![]);
        t.push(Vertex(vec![0, 2]), 4.0, 0.0, vec![0.1, 2.0 / 3.0]);
        t.push(Vertex(vec![0, 0]), 1.25, 0.0, vec![1e-300, 7.0]);
        t
    }

    #[test]
    fn best_so_far_and_layout() {
        let t = sample();
        let best: Vec<f64> = t.records.iter().map(|r| r.best_so_far).collect();
        assert_eq!(best, vec![3.5, 3.5, 1.25]);
        assert_eq!(t.best_vertex(), Some(&Vertex(vec![0, 0])));
        let csv = t.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("iteration,vertex,value,best_so_far,seconds,beta_medians"));
        assert_eq!(lines.next(), Some("1,1;2,3.5,3.5,0,"));
    }

    #[test]
    fn save_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("run.csv");
        let t = sample();
        let cfg = RunConfig::new(
            combo_benchmarks::BenchmarkConfig::default_for("branin").unwrap(),
            Optimizer::Combo,
            3,
            5,
        );
        t.save(&path, &cfg).unwrap();
        assert!(meta_path(&path).ends_with("sub/run.meta.toml"));
        assert_eq!(Trace::load(&path).unwrap(), t);
    }
}
