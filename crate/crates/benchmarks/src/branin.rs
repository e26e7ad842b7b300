//! Branin on a regular grid, each coordinate an ordinal variable (path
//! sub-graph).

use std::f64::consts::PI;

use combo_core::{SearchSpace, SubGraph, Vertex};
use serde::{Deserialize, Serialize};

use crate::{check_input, BenchmarkError, Objective, Result};

/// Global minimum of the continuous function.
pub const BRANIN_MIN: f64 = 0.397_887_357_729_738_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BraninConfig {
    /// Grid points per dimension.
    pub points: usize,
}

impl Default for BraninConfig {
    fn default() -> Self {
        BraninConfig { points: 51 }
    }
}

pub fn branin(x1: f64, x2: f64) -> f64 {
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    (x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

#[derive(Debug, Clone)]
pub struct Branin {
    points: usize,
    space: SearchSpace,
}

impl Branin {
    pub fn new(config: BraninConfig) -> Result<Self> {
        if config.points < 2 {
            return Err(BenchmarkError::Config("the grid needs at least 2 points".into()));
        }
        let g = SubGraph::path(config.points)?;
        Ok(Branin {
            points: config.points,
            space: SearchSpace::new(vec![g.clone(), g])?,
        })
    }

    /// Grid index to the classical domain `[-5, 10] x [0, 15]`.
    pub fn coordinates(&self, i: usize, j: usize) -> (f64, f64) {
        let step = (self.points - 1) as f64;
        (-5.0 + 15.0 * i as f64 / step, 15.0 * j as f64 / step)
    }

    pub fn value(&self, x: &[usize]) -> Result<f64> {
        check_input(x, &[self.points, self.points])?;
        let (a, b) = self.coordinates(x[0], x[1]);
        Ok(branin(a, b))
    }
}

impl Objective for Branin {
    fn name(&self) -> &str {
        "branin"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, v: &Vertex) -> Result<f64> {
        self.value(v)
    }
}
