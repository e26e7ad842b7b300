//! ARD diffusion kernel assembled from per-variable factors.
//!
//! For variable `i` with Laplacian eigensystem `(lambda, U)` and scale
//! `beta_i` the factor is
//!
//! ```text
//! F_i = U diag(exp(-beta_i * lambda) / psi_i) U^T,  psi_i = mean_j exp(-beta_i * lambda_j)
//! ```
//!
//! and the kernel between two vertices is `sigma_f^2 * prod_i F_i[v_i, w_i]`,
//! the `(v, w)` entry of the Kronecker product of the factors. Building the
//! factors costs `O(sum_i |V_i|^3)`; nothing proportional to the product
//! space is ever formed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Eigensystem, SearchSpace, Vertex};

/// One variable's `|V_i| x |V_i|` factor, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    size: usize,
    data: Vec<f64>,
}

impl Factor {
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.size + b]
    }

    #[inline]
    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.size..(a + 1) * self.size]
    }

    /// Row-major entries.
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.size).map(|a| self.get(a, a)).sum()
    }
}

/// Builds one factor. `normalize` toggles the `psi` division; only oracle
/// comparisons against the raw matrix exponential turn it off.
pub fn variable_factor(eigen: &Eigensystem, beta: f64, normalize: bool) -> Factor {
    let n = eigen.len();
    let weights: Vec<f64> = eigen
        .eigenvalues
        .iter()
        .map(|&l| (-beta * l).exp().max(f64::MIN_POSITIVE))
        .collect();
    let psi = if normalize {
        weights.iter().sum::<f64>() / n as f64
    } else {
        1.0
    };
    let u = &eigen.eigenvectors;
    let mut data = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let mut s = 0.0;
            for (j, w) in weights.iter().enumerate() {
                s += u[(a, j)] * w * u[(b, j)];
            }
            s /= psi;
            data[a * n + b] = s;
            data[b * n + a] = s;
        }
    }
    Factor { size: n, data }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelFactors {
    factors: Vec<Factor>,
    betas: Vec<f64>,
}

/// Normalized factors for every variable of `space`.
pub fn kernel_factors(space: &SearchSpace, betas: &[f64]) -> Result<KernelFactors> {
    KernelFactors::new(space, betas, true)
}

impl KernelFactors {
    pub fn new(space: &SearchSpace, betas: &[f64], normalize: bool) -> Result<Self> {
        if betas.len() != space.n_variables() {
            return Err(Error::Domain(format!(
                "{} scales given for {} variables",
                betas.len(),
                space.n_variables()
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(**b >= 0.0) || !b.is_finite()) {
            return Err(Error::Domain(format!("scale parameter must be finite and >= 0, got {b}")));
        }
        let factors = space
            .variables()
            .iter()
            .zip(betas)
            .map(|(var, &beta)| variable_factor(&var.eigen, beta, normalize))
            .collect();
        Ok(KernelFactors {
            factors,
            betas: betas.to_vec(),
        })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Replaces one variable's factor after a move of its scale.
    pub fn set_beta(&mut self, space: &SearchSpace, i: usize, beta: f64) {
        self.factors[i] = variable_factor(&space.variables()[i].eigen, beta, true);
        self.betas[i] = beta;
    }

    fn check(&self, v: &Vertex) -> Result<()> {
        if v.len() != self.factors.len() {
            return Err(Error::VertexArity {
                expected: self.factors.len(),
                got: v.len(),
            });
        }
        for (index, (&value, f)) in v.iter().zip(&self.factors).enumerate() {
            if value >= f.size {
                return Err(Error::VertexOutOfRange {
                    index,
                    value,
                    size: f.size,
                });
            }
        }
        Ok(())
    }

    /// `signal_variance * prod_i F_i[v1_i, v2_i]`.
    pub fn kernel_entry(&self, v1: &Vertex, v2: &Vertex, signal_variance: f64) -> Result<f64> {
        self.check(v1)?;
        self.check(v2)?;
        Ok(signal_variance * self.unit_entry(v1, v2))
    }

    #[inline]
    pub(crate) fn unit_entry(&self, v1: &[usize], v2: &[usize]) -> f64 {
        self.factors
            .iter()
            .zip(v1.iter().zip(v2))
            .fold(1.0, |acc, (f, (&a, &b))| acc * f.get(a, b))
    }

    /// Cross-covariance matrix between two vertex lists.
    pub fn gram(&self, x1: &[Vertex], x2: &[Vertex], signal_variance: f64) -> Result<DMatrix<f64>> {
        for v in x1.iter().chain(x2) {
            self.check(v)?;
        }
        Ok(DMatrix::from_fn(x1.len(), x2.len(), |a, b| {
            signal_variance * self.unit_entry(&x1[a], &x2[b])
        }))
    }

    /// Row-major `n x n` matrix `[F_i[x_a_i, x_b_i]]` for a single variable.
    pub fn variable_gram(&self, i: usize, xs: &[Vertex]) -> Vec<f64> {
        let f = &self.factors[i];
        let n = xs.len();
        let mut out = vec![0.0; n * n];
        for a in 0..n {
            let row = f.row(xs[a][i]);
            for b in 0..n {
                out[a * n + b] = row[xs[b][i]];
            }
        }
        out
    }

    /// Row-major unit-signal Gram of `xs` with itself.
    pub fn unit_gram(&self, xs: &[Vertex]) -> Vec<f64> {
        let n = xs.len();
        let mut out = vec![1.0; n * n];
        for i in 0..self.factors.len() {
            let f = &self.factors[i];
            for a in 0..n {
                let row = f.row(xs[a][i]);
                let dst = &mut out[a * n..(a + 1) * n];
                for (d, x) in dst.iter_mut().zip(xs) {
                    *d *= row[x[i]];
                }
            }
        }
        out
    }
}
