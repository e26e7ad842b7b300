//! Aggregation of traces into result tables and best-so-far curves.

use std::collections::BTreeMap;
use std::io::Write;

use crate::config::Optimizer;
use crate::error::{HarnessError, Result};
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub optimizer: Optimizer,
    pub runs: usize,
    /// Mean of the final best-so-far values.
    pub mean: f64,
    /// Sample standard deviation over `sqrt(runs)`; 0 for a single run.
    pub std_err: f64,
    /// Mean best-so-far per iteration. Shorter traces hold their last
    /// value.
    pub curve: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub benchmark: String,
    pub rows: Vec<SummaryRow>,
}

pub fn mean_and_std_err(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One row per optimizer. All traces must come from the same benchmark.
pub fn emit_summary(traces: &[Trace]) -> Result<Summary> {
    let first = traces.first().ok_or_else(|| HarnessError::Summary("no traces".into()))?;
    if let Some(t) = traces.iter().find(|t| t.benchmark != first.benchmark) {
        return Err(HarnessError::Summary(format!(
            "mixed benchmarks '{}' and '{}'",
            first.benchmark, t.benchmark
        )));
    }
    if traces.iter().any(|t| t.is_empty()) {
        return Err(HarnessError::Summary("empty trace".into()));
    }
    let mut groups: BTreeMap<Optimizer, Vec<&Trace>> = BTreeMap::new();
    for t in traces {
        groups.entry(t.optimizer).or_default().push(t);
    }
    let rows = groups
        .into_iter()
        .map(|(optimizer, ts)| {
            let finals: Vec<f64> = ts.iter().map(|t| t.final_best().expect("nonempty")).collect();
            let (mean, std_err) = mean_and_std_err(&finals);
            let len = ts.iter().map(|t| t.len()).max().expect("nonempty group");
            let curve = (0..len)
                .map(|i| {
                    ts.iter()
                        .map(|t| t.records[i.min(t.len() - 1)].best_so_far)
                        .sum::<f64>()
                        / ts.len() as f64
                })
                .collect();
            SummaryRow {
                optimizer,
                runs: ts.len(),
                mean,
                std_err,
                curve,
            }
        })
        .collect();
    Ok(Summary {
        benchmark: first.benchmark.clone(),
        rows,
    })
}

impl Summary {
    /// `benchmark,optimizer,runs,mean,std_err`
    pub fn write_table<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["benchmark", "optimizer", "runs", "mean", "std_err"])?;
        for r in &self.rows {
            out.write_record([
                self.benchmark.clone(),
                r.optimizer.to_string(),
                r.runs.to_string(),
                r.mean.to_string(),
                r.std_err.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Long format, `iteration,optimizer,mean_best_so_far`.
    pub fn write_curves<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iteration", "optimizer", "mean_best_so_far"])?;
        for r in &self.rows {
            for (i, v) in r.curve.iter().enumerate() {
                out.write_record([(i + 1).to_string(), r.optimizer.to_string(), v.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn row(&self, optimizer: Optimizer) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.optimizer == optimizer)
    }
}
