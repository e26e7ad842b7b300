//! Dense reference implementations for small spaces.
//!
//! Everything here materializes the full product graph and works with plain
//! dense matrices: a hand-written cyclic Jacobi eigensolver, explicit
//! Kronecker sums, explicit inverses. None of it shares code with the
//! factored kernel or the Cholesky-based GP, so agreement between the two is
//! meaningful. Only usable when the space has a few hundred vertices.

use nalgebra::{DMatrix, DVector};

use crate::graph::{SearchSpace, Vertex};
use crate::surrogate::{GpParams, PredictiveDistribution};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues are
/// returned ascending with matching eigenvector columns.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    jacobi_eigen(m).0
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// `sum_i w_i * (I ⊗ .. ⊗ L_i ⊗ .. ⊗ I)` with the first variable as the
/// most significant Kronecker index (matching [`SearchSpace::rank`]).
pub fn weighted_product_laplacian(space: &SearchSpace, weights: &[f64]) -> DMatrix<f64> {
    let vars = space.variables();
    let n = space.total_size() as usize;
    let mut total = DMatrix::zeros(n, n);
    for (i, w) in weights.iter().enumerate() {
        let mut term = DMatrix::from_element(1, 1, 1.0);
        for (j, var) in vars.iter().enumerate() {
            let f = if i == j {
                var.graph.laplacian() * *w
            } else {
                DMatrix::identity(var.graph.size(), var.graph.size())
            };
            term = kron(&term, &f);
        }
        total += term;
    }
    total
}

pub fn product_laplacian(space: &SearchSpace) -> DMatrix<f64> {
    weighted_product_laplacian(space, &vec![1.0; space.n_variables()])
}

/// Adjacency of the product graph read back off its Laplacian.
pub fn product_adjacency(space: &SearchSpace) -> DMatrix<f64> {
    let l = product_laplacian(space);
    DMatrix::from_fn(l.nrows(), l.ncols(), |r, c| if r != c && l[(r, c)] != 0.0 { 1.0 } else { 0.0 })
}

/// Diffusion kernel `exp(-L_beta)` over every vertex of the space from one
/// eigendecomposition of the assembled ARD Laplacian. With `normalize` the
/// result is divided by `trace / N`, the product of per-variable
/// normalizers.
pub fn dense_diffusion_kernel(space: &SearchSpace, betas: &[f64], normalize: bool) -> DMatrix<f64> {
    let l = weighted_product_laplacian(space, betas);
    let (values, vectors) = jacobi_eigen(&l);
    let n = values.len();
    let d = DVector::from_iterator(n, values.iter().map(|&x| (-x).exp()));
    let k = &vectors * DMatrix::from_diagonal(&d) * vectors.transpose();
    if normalize {
        let psi = k.trace() / n as f64;
        k / psi
    } else {
        k
    }
}

/// Reference GP on a fully materialized unit-signal kernel matrix indexed
/// by vertex rank.
pub struct DenseGp<'a> {
    pub space: &'a SearchSpace,
    pub kernel: &'a DMatrix<f64>,
}

impl DenseGp<'_> {
    fn k(&self, a: &Vertex, b: &Vertex) -> f64 {
        self.kernel[(self.space.rank(a).unwrap(), self.space.rank(b).unwrap())]
    }

    fn covariance(&self, xs: &[Vertex], params: &GpParams) -> DMatrix<f64> {
        let n = xs.len();
        DMatrix::from_fn(n, n, |a, b| {
            params.signal_variance * self.k(&xs[a], &xs[b])
                + if a == b { params.noise_variance } else { 0.0 }
        })
    }

    /// Explicit inverse for the quadratic form, eigenvalues for the log-det.
    pub fn neg_log_marginal_likelihood(&self, xs: &[Vertex], y: &[f64], params: &GpParams) -> f64 {
        let a = self.covariance(xs, params);
        let inv = a.clone().try_inverse().expect("invertible covariance");
        let r = DVector::from_iterator(y.len(), y.iter().map(|v| v - params.mean));
        let quad = (r.transpose() * inv * &r)[(0, 0)];
        let logdet: f64 = jacobi_eigenvalues(&a).iter().map(|l| l.ln()).sum();
        0.5 * quad + 0.5 * logdet + 0.5 * y.len() as f64 * (2.0 * std::f64::consts::PI).ln()
    }

    pub fn predict(
        &self,
        xs: &[Vertex],
        y: &[f64],
        params: &GpParams,
        v: &Vertex,
    ) -> PredictiveDistribution {
        let prior = params.signal_variance * self.k(v, v);
        if xs.is_empty() {
            return PredictiveDistribution {
                mean: params.mean,
                variance: prior,
            };
        }
        let inv = self.covariance(xs, params).try_inverse().expect("invertible covariance");
        let ks = DVector::from_iterator(
            xs.len(),
            xs.iter().map(|x| params.signal_variance * self.k(v, x)),
        );
        let r = DVector::from_iterator(y.len(), y.iter().map(|val| val - params.mean));
        let mean = params.mean + (ks.transpose() * &inv * r)[(0, 0)];
        let variance = prior - (ks.transpose() * &inv * &ks)[(0, 0)];
        PredictiveDistribution {
            mean,
            variance: variance.max(0.0),
        }
    }
}

/// Exhaustive minimum of `f` over a small space, ties to the lowest vertex.
pub fn brute_force_min<F>(space: &SearchSpace, cap: u128, mut f: F) -> crate::Result<(Vertex, f64)>
where
    F: FnMut(&Vertex) -> f64,
{
    let mut best: Option<(Vertex, f64)> = None;
    for v in space.enumerate(cap)? {
        let val = f(&v);
        if best.as_ref().is_none_or(|(_, b)| val < *b) {
            best = Some((v, val));
        }
    }
    Ok(best.expect("spaces have at least one vertex"))
}
