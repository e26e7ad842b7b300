//! DIMACS WCNF reader and the weighted MaxSAT objective.
//!
//! Accepted input:
//!
//! ```text
//! c comment
//! p wcnf <n_vars> <n_clauses> [top]
//! <weight> <lit> <lit> ... 0
//! ```
//!
//! One clause per line. Clauses whose weight reaches `top` are hard
//! clauses and are rejected.

use std::fmt::Write as _;
use std::path::Path;

use combo_core::{SearchSpace, Vertex};
use serde::{Deserialize, Serialize};

use crate::{check_binary, BenchmarkError, Objective, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub weight: f64,
    pub literals: Vec<i64>,
}

/// How raw clause weights become objective weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Subtract the mean, divide by the population standard deviation.
    #[default]
    Standardized,
    /// Divide by the Euclidean norm of the weight vector.
    Unit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WcnfInstance {
    pub n_vars: usize,
    pub top: Option<f64>,
    pub clauses: Vec<Clause>,
    pub weighting: Weighting,
    pub normalized_weights: Vec<f64>,
}

fn perr(line: usize, message: impl Into<String>) -> BenchmarkError {
    BenchmarkError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_wcnf(text: &str) -> Result<WcnfInstance> {
    parse_wcnf_with(text, Weighting::Standardized)
}

pub fn parse_wcnf_with(text: &str, weighting: Weighting) -> Result<WcnfInstance> {
    let mut header: Option<(usize, usize, Option<f64>, usize)> = None;
    let mut clauses = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('c') {
            continue;
        }
        if s.starts_with('p') {
            if header.is_some() {
                return Err(perr(line, "duplicate header"));
            }
            header = Some(parse_header(s, line)?);
            continue;
        }
        let Some((n_vars, _, top, _)) = header else {
            return Err(perr(line, "clause before the 'p wcnf' header"));
        };
        clauses.push(parse_clause(s, line, n_vars, top)?);
    }
    let Some((n_vars, n_clauses, top, header_line)) = header else {
        return Err(perr(last_line.max(1), "missing 'p wcnf' header"));
    };
    if clauses.len() != n_clauses {
        return Err(perr(
            header_line,
            format!("header declares {n_clauses} clauses, found {}", clauses.len()),
        ));
    }
    let weights: Vec<f64> = clauses.iter().map(|c: &Clause| c.weight).collect();
    let normalized_weights = normalize(&weights, weighting).map_err(|m| perr(header_line, m))?;
    Ok(WcnfInstance {
        n_vars,
        top,
        clauses,
        weighting,
        normalized_weights,
    })
}

fn parse_header(s: &str, line: usize) -> Result<(usize, usize, Option<f64>, usize)> {
    let t: Vec<&str> = s.split_whitespace().collect();
    if t.len() < 4 || t.len() > 5 || t[0] != "p" || t[1] != "wcnf" {
        return Err(perr(line, format!("malformed header '{s}'")));
    }
    let n_vars: usize = t[2]
        .parse()
        .map_err(|_| perr(line, format!("bad variable count '{}'", t[2])))?;
    let n_clauses: usize = t[3]
        .parse()
        .map_err(|_| perr(line, format!("bad clause count '{}'", t[3])))?;
    if n_vars == 0 {
        return Err(perr(line, "instance has no variables"));
    }
    let top = match t.get(4) {
        Some(x) => Some(
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| perr(line, format!("bad top weight '{x}'")))?,
        ),
        None => None,
    };
    Ok((n_vars, n_clauses, top, line))
}

fn parse_clause(s: &str, line: usize, n_vars: usize, top: Option<f64>) -> Result<Clause> {
    let mut tokens = s.split_whitespace();
    let wtok = tokens.next().expect("nonempty line");
    let weight: f64 = wtok
        .parse()
        .ok()
        .filter(|w: &f64| w.is_finite())
        .ok_or_else(|| perr(line, format!("bad clause weight '{wtok}'")))?;
    if weight <= 0.0 {
        return Err(perr(line, format!("clause weight must be positive, got {weight}")));
    }
    if top.is_some_and(|t| weight >= t) {
        return Err(perr(line, "hard clauses are not supported"));
    }
    let mut literals = Vec::new();
    let mut terminated = false;
    for tok in tokens {
        if terminated {
            return Err(perr(line, format!("unexpected '{tok}' after clause terminator")));
        }
        let lit: i64 = tok
            .parse()
            .map_err(|_| perr(line, format!("bad literal '{tok}'")))?;
        if lit == 0 {
            terminated = true;
            continue;
        }
        if lit.unsigned_abs() as usize > n_vars {
            return Err(perr(line, format!("literal {lit} exceeds {n_vars} variables")));
        }
        literals.push(lit);
    }
    if !terminated {
        return Err(perr(line, "clause is missing its terminating 0"));
    }
    if literals.is_empty() {
        return Err(perr(line, "empty clause"));
    }
    Ok(Clause { weight, literals })
}

fn normalize(w: &[f64], weighting: Weighting) -> std::result::Result<Vec<f64>, String> {
    if w.is_empty() {
        return Ok(Vec::new());
    }
    match weighting {
        Weighting::Standardized => {
            let n = w.len() as f64;
            let mean = w.iter().sum::<f64>() / n;
            let sd = (w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
            if sd == 0.0 {
                return Err("all clause weights are equal; cannot standardize".into());
            }
            Ok(w.iter().map(|x| (x - mean) / sd).collect())
        }
        Weighting::Unit => {
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            Ok(w.iter().map(|x| x / norm).collect())
        }
    }
}

pub fn load_wcnf(path: &Path, weighting: Weighting) -> Result<WcnfInstance> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchmarkError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_wcnf_with(&text, weighting)
}

impl WcnfInstance {
    /// Writes the instance back out in the accepted format.
    pub fn to_wcnf_string(&self) -> String {
        let mut s = String::new();
        match self.top {
            Some(t) => writeln!(s, "p wcnf {} {} {}", self.n_vars, self.clauses.len(), t),
            None => writeln!(s, "p wcnf {} {}", self.n_vars, self.clauses.len()),
        }
        .expect("writing to a String");
        for c in &self.clauses {
            write!(s, "{}", c.weight).expect("writing to a String");
            for l in &c.literals {
                write!(s, " {l}").expect("writing to a String");
            }
            s.push_str(" 0\n");
        }
        s
    }

    pub fn satisfied(&self, x: &[usize]) -> Vec<bool> {
        self.clauses
            .iter()
            .map(|c| {
                c.literals.iter().any(|&l| {
                    let v = x[l.unsigned_abs() as usize - 1];
                    if l > 0 {
                        v == 1
                    } else {
                        v == 0
                    }
                })
            })
            .collect()
    }

    /// Negated total normalized weight of satisfied clauses.
    pub fn objective(&self, x: &[usize]) -> Result<f64> {
        check_binary(x, self.n_vars)?;
        Ok(-self
            .satisfied(x)
            .iter()
            .zip(&self.normalized_weights)
            .filter(|(s, _)| **s)
            .map(|(_, w)| w)
            .sum::<f64>())
    }
}

#[derive(Debug, Clone)]
pub struct WMaxSat {
    instance: WcnfInstance,
    space: SearchSpace,
}

impl WMaxSat {
    pub fn new(instance: WcnfInstance) -> Result<Self> {
        Ok(WMaxSat {
            space: SearchSpace::binary(instance.n_vars)?,
            instance,
        })
    }

    pub fn instance(&self) -> &WcnfInstance {
        &self.instance
    }
}

impl Objective for WMaxSat {
    fn name(&self) -> &str {
        "wmaxsat"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, v: &Vertex) -> Result<f64> {
        self.instance.objective(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "p wcnf 2 2\n3 1 2 0\n5 -1 0\n";

    #[test]
    fn parses_small_instance() {
        let i = parse_wcnf(SMALL).unwrap();
        assert_eq!(i.n_vars, 2);
        assert_eq!(
            i.clauses,
            vec![
                Clause {
                    weight: 3.0,
                    literals: vec![1, 2]
                },
                Clause {
                    weight: 5.0,
                    literals: vec![-1]
                }
            ]
        );
        assert_eq!(i.normalized_weights, vec![-1.0, 1.0]);
    }

    #[test]
    fn objective_by_hand() {
        let i = parse_wcnf(SMALL).unwrap();
        assert_eq!(i.objective(&[1, 0]).unwrap(), 1.0);
        assert_eq!(i.objective(&[0, 1]).unwrap(), 0.0);
        assert_eq!(i.objective(&[0, 0]).unwrap(), -1.0);
        assert!(i.objective(&[0]).is_err());
    }

    #[test]
    fn comments_top_and_unit_weights() {
        let text = "c hello\nc\np wcnf 3 2 100\n\n3 1 -3 0\n4 2 0\n";
        let i = parse_wcnf_with(text, Weighting::Unit).unwrap();
        assert_eq!(i.top, Some(100.0));
        assert!((i.normalized_weights[0] - 0.6).abs() < 1e-15);
        assert!((i.normalized_weights[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("p wcnf 2 2\n3 1 2 0\n", 1),
            ("p wcnf 2 1\n3 1 2\n", 2),
            ("p wcnf 2 1\n3 1 3 0\n", 2),
            ("p wcnf 2 1 10\n10 1 0\n", 2),
            ("c x\n3 1 0\n", 2),
            ("p cnf 2 1\n1 2 0\n", 1),
            ("p wcnf 2 1\n2 0\n", 2),
            ("p wcnf 2 2\n3 1 0\n3 2 0\n", 1),
        ];
        for (text, want) in cases {
            match parse_wcnf(text) {
                Err(BenchmarkError::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip() {
        let text = "c x\np wcnf 4 3 50\n3 1 -2 0\n2.5 4 0\n7 -3 -4 2 0\n";
        let i = parse_wcnf(text).unwrap();
        assert_eq!(parse_wcnf(&i.to_wcnf_string()).unwrap(), i);
    }
}
