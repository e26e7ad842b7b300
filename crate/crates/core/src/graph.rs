//! Sub-graphs for individual variables and the implicit product space.
//!
//! A categorical variable with `k` categories becomes the complete graph
//! `K_k`; an ordinal variable with `n` levels becomes the path `P_n`. Two
//! vertices of the product graph are adjacent iff they differ in exactly one
//! variable and that variable's pair of categories is an edge of its
//! sub-graph.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of vertices [`SearchSpace::shortest_path_oracle`]
/// is willing to enumerate.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubGraphKind {
    Complete(usize),
    Path(usize),
    /// Row-major symmetric adjacency with an empty diagonal.
    Custom(Vec<Vec<bool>>),
}

/// One variable's graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SubGraph {
    kind: SubGraphKind,
    size: usize,
    // sorted adjacency lists
    adjacency: Vec<Vec<usize>>,
}

impl SubGraph {
    pub fn complete(k: usize) -> Result<Self> {
        build_subgraph(SubGraphKind::Complete(k))
    }

    pub fn path(n: usize) -> Result<Self> {
        build_subgraph(SubGraphKind::Path(n))
    }

    pub fn custom(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        build_subgraph(SubGraphKind::Custom(adjacency))
    }

    pub fn kind(&self) -> &SubGraphKind {
        &self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adjacency[a].len()
    }

    pub fn neighbors_of(&self, a: usize) -> &[usize] {
        &self.adjacency[a]
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        a < self.size && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Edges as `(a, b)` pairs with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nbrs) in self.adjacency.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// `L = D - A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.size;
        let mut l = DMatrix::zeros(n, n);
        for (a, nbrs) in self.adjacency.iter().enumerate() {
            l[(a, a)] = nbrs.len() as f64;
            for &b in nbrs {
                l[(a, b)] = -1.0;
            }
        }
        l
    }

    /// Graph Fourier frequencies and bases of this sub-graph.
    ///
    /// Complete graphs use the closed-form spectrum `{0, k, ..., k}` with a
    /// Helmert basis; all other graphs go through a dense symmetric
    /// eigensolver.
    pub fn eigensystem(&self) -> Result<Eigensystem> {
        match self.kind {
            SubGraphKind::Complete(k) => Ok(complete_eigensystem(k)),
            _ => numeric_eigensystem(&self.laplacian()),
        }
    }
}

/// Builds a sub-graph, rejecting empty variables and malformed adjacency.
pub fn build_subgraph(kind: SubGraphKind) -> Result<SubGraph> {
    let adjacency = match &kind {
        SubGraphKind::Complete(k) => {
            let k = *k;
            check_size(k)?;
            (0..k)
                .map(|a| (0..k).filter(|&b| b != a).collect())
                .collect::<Vec<Vec<usize>>>()
        }
        SubGraphKind::Path(n) => {
            let n = *n;
            check_size(n)?;
            (0..n)
                .map(|a| {
                    let mut v = Vec::with_capacity(2);
                    if a > 0 {
                        v.push(a - 1);
                    }
                    if a + 1 < n {
                        v.push(a + 1);
                    }
                    v
                })
                .collect()
        }
        SubGraphKind::Custom(rows) => {
            let n = rows.len();
            check_size(n)?;
            for (a, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::InvalidVariable(format!(
                        "adjacency row {a} has length {}, expected {n}",
                        row.len()
                    )));
                }
                if row[a] {
                    return Err(Error::InvalidVariable(format!("self-loop at vertex {a}")));
                }
                for (b, &edge) in row.iter().enumerate() {
                    if edge != rows[b][a] {
                        return Err(Error::InvalidVariable(format!(
                            "adjacency not symmetric at ({a}, {b})"
                        )));
                    }
                }
            }
            rows.iter()
                .map(|row| (0..n).filter(|&b| row[b]).collect())
                .collect()
        }
    };
    let size = adjacency.len();
    Ok(SubGraph {
        kind,
        size,
        adjacency,
    })
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidVariable("a variable needs at least one category".into()))
    } else {
        Ok(())
    }
}

/// Eigenvalues ascending, eigenvector `j` in column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl Eigensystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `U diag(f(lambda)) U^T`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DVector::from_iterator(self.len(), self.eigenvalues.iter().map(|&l| f(l)));
        let scaled = &self.eigenvectors * DMatrix::from_diagonal(&d);
        scaled * self.eigenvectors.transpose()
    }
}

fn complete_eigensystem(k: usize) -> Eigensystem {
    let mut eigenvalues = vec![k as f64; k];
    eigenvalues[0] = 0.0;
    // Helmert basis: constant vector, then contrasts of the first j entries
    // against entry j.
    let mut u = DMatrix::zeros(k, k);
    let c = 1.0 / (k as f64).sqrt();
    for a in 0..k {
        u[(a, 0)] = c;
    }
    for j in 1..k {
        let norm = ((j * (j + 1)) as f64).sqrt();
        for a in 0..j {
            u[(a, j)] = 1.0 / norm;
        }
        u[(j, j)] = -(j as f64) / norm;
    }
    Eigensystem {
        eigenvalues,
        eigenvectors: u,
    }
}

fn numeric_eigensystem(laplacian: &DMatrix<f64>) -> Result<Eigensystem> {
    let n = laplacian.nrows();
    let diag = || Error::Eigendecomposition {
        size: n,
        max_abs: laplacian.amax(),
    };
    let eig = SymmetricEigen::try_new(laplacian.clone(), f64::EPSILON, 10_000).ok_or_else(diag)?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(diag());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    // Laplacians are PSD; rounding can leave the null eigenvalue at -1e-16.
    let eigenvalues = order.iter().map(|&j| eig.eigenvalues[j].max(0.0)).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// A joint assignment: one category index per variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex(pub Vec<usize>);

impl Vertex {
    pub fn new(indices: Vec<usize>) -> Self {
        Vertex(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn hamming(&self, other: &Vertex) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl Deref for Vertex {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Vertex {
    fn from(v: Vec<usize>) -> Self {
        Vertex(v)
    }
}

/// Semicolon-joined indices, e.g. `0;2;1`.
impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub graph: SubGraph,
    pub eigen: Eigensystem,
}

/// Ordered product of sub-graphs. The product graph itself is implicit.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    variables: Vec<Variable>,
}

impl SearchSpace {
    /// Computes every sub-graph's eigensystem once.
    pub fn new(graphs: Vec<SubGraph>) -> Result<Self> {
        let variables = graphs
            .into_iter()
            .map(|graph| {
                let eigen = graph.eigensystem()?;
                Ok(Variable { graph, eigen })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SearchSpace { variables })
    }

    /// `n` binary variables.
    pub fn binary(n: usize) -> Result<Self> {
        Self::new(vec![SubGraph::complete(2)?; n])
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.graph.size()).collect()
    }

    /// Number of vertices, saturating at `u128::MAX`.
    pub fn total_size(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.graph.size() as u128))
    }

    pub fn check(&self, v: &Vertex) -> Result<()> {
        if v.len() != self.variables.len() {
            return Err(Error::VertexArity {
                expected: self.variables.len(),
                got: v.len(),
            });
        }
        for (index, (&value, var)) in v.iter().zip(&self.variables).enumerate() {
            if value >= var.graph.size() {
                return Err(Error::VertexOutOfRange {
                    index,
                    value,
                    size: var.graph.size(),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.check(v).is_ok()
    }

    /// Product-graph neighbours, ordered by variable and then category.
    pub fn neighbors(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        self.check(v)?;
        Ok(self.neighbors_unchecked(v))
    }

    pub(crate) fn neighbors_unchecked(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        for (i, var) in self.variables.iter().enumerate() {
            for &c in var.graph.neighbors_of(v[i]) {
                let mut w = v.clone();
                w.0[i] = c;
                out.push(w);
            }
        }
        out
    }

    /// Each component drawn independently and uniformly.
    pub fn random_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> Vertex {
        Vertex(
            self.variables
                .iter()
                .map(|v| rng.random_range(0..v.graph.size()))
                .collect(),
        )
    }

    /// Mixed-radix rank of `v` (first variable most significant), or `None`
    /// if the space does not fit in `usize`.
    pub fn rank(&self, v: &Vertex) -> Option<usize> {
        let mut r: usize = 0;
        for (&x, var) in v.iter().zip(&self.variables) {
            r = r.checked_mul(var.graph.size())?.checked_add(x)?;
        }
        Some(r)
    }

    pub fn unrank(&self, mut r: usize) -> Vertex {
        let mut idx = vec![0; self.variables.len()];
        for (i, var) in self.variables.iter().enumerate().rev() {
            let s = var.graph.size();
            idx[i] = r % s;
            r /= s;
        }
        Vertex(idx)
    }

    /// All vertices in lexicographic order, if at most `cap` of them.
    pub fn enumerate(&self, cap: u128) -> Result<Vec<Vertex>> {
        let size = self.total_size();
        if size > cap {
            return Err(Error::SpaceTooLarge { size, cap });
        }
        Ok((0..size as usize).map(|r| self.unrank(r)).collect())
    }

    /// Breadth-first graph distance on the materialized product graph.
    /// Verification use only.
    pub fn shortest_path_oracle(&self, v1: &Vertex, v2: &Vertex) -> Result<usize> {
        self.shortest_path_oracle_with_cap(v1, v2, DEFAULT_ENUMERATION_CAP)
    }

    pub fn shortest_path_oracle_with_cap(
        &self,
        v1: &Vertex,
        v2: &Vertex,
        cap: u128,
    ) -> Result<usize> {
        self.check(v1)?;
        self.check(v2)?;
        let size = self.total_size();
        if size > cap {
            return Err(Error::SpaceTooLarge { size, cap });
        }
        let n = size as usize;
        let start = self.rank(v1).expect("checked size");
        let goal = self.rank(v2).expect("checked size");
        let mut dist = vec![usize::MAX; n];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(r) = queue.pop_front() {
            if r == goal {
                return Ok(dist[r]);
            }
            let v = self.unrank(r);
            for w in self.neighbors_unchecked(&v) {
                let rw = self.rank(&w).expect("checked size");
                if dist[rw] == usize::MAX {
                    dist[rw] = dist[r] + 1;
                    queue.push_back(rw);
                }
            }
        }
        // Disconnected custom sub-graphs.
        Ok(usize::MAX)
    }
}
