//! Directed graphs, neighbor indexing with normalization constants, and node
//! relabeling.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Node feature matrix (one row per node) plus directed edges `(src, dst)`.
///
/// Messages flow along edges: node `dst` aggregates over its in-neighbors.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<T> {
    features: Matrix<T>,
    edges: Vec<(usize, usize)>,
}

impl<T: Scalar> Graph<T> {
    /// Validates endpoints and drops duplicate edges, returning the number dropped.
    pub fn build(features: Matrix<T>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<(Self, usize)> {
        let n = features.rows();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut duplicates = 0;
        for (src, dst) in edges {
            if src >= n || dst >= n {
                return Err(Error::EdgeOutOfRange { src, dst, n });
            }
            if seen.insert((src, dst)) {
                kept.push((src, dst));
            } else {
                duplicates += 1;
            }
        }
        if duplicates > 0 {
            log::debug!("dropped {duplicates} duplicate edges");
        }
        Ok((
            Self {
                features,
                edges: kept,
            },
            duplicates,
        ))
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.features.rows()
    }

    #[inline]
    pub fn feature_dim(&self) -> usize {
        self.features.cols()
    }

    #[inline]
    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// In-degree per node, not counting self-loops that are added by indexing.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_nodes()];
        for &(_, dst) in &self.edges {
            deg[dst] += 1;
        }
        deg
    }

    /// Moves row `i` to row `p(i)` and maps every edge `(s, t)` to `(p(s), p(t))`.
    pub fn permute(&self, p: &Permutation) -> Result<Self> {
        let n = self.n_nodes();
        if p.len() != n {
            return Err(Error::invalid(
                "permute_graph",
                format!("permutation of {} for a graph of {n} nodes", p.len()),
            ));
        }
        let mut features = Matrix::zeros(n, self.feature_dim());
        for i in 0..n {
            features.row_mut(p.apply(i)).copy_from_slice(self.features.row(i));
        }
        let edges = self
            .edges
            .iter()
            .map(|&(s, t)| (p.apply(s), p.apply(t)))
            .collect();
        Ok(Self { features, edges })
    }
}

/// Convenience wrapper around [`Graph::build`].
pub fn build_graph<T: Scalar>(
    features: Matrix<T>,
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> Result<(Graph<T>, usize)> {
    Graph::build(features, edges)
}

pub fn permute_graph<T: Scalar>(g: &Graph<T>, p: &Permutation) -> Result<Graph<T>> {
    g.permute(p)
}

/// How the constants `c_ij` of the convolution are formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormScheme {
    /// `c_ij = sqrt(deg(i) · deg(j))`
    #[default]
    Symmetric,
    /// `c_ij = deg(i)`
    Mean,
}

/// Per-node in-neighbor lists `N(i)` (ascending ids) with their `c_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyIndex<T> {
    neighbors: Vec<Vec<usize>>,
    norm: Vec<Vec<T>>,
}

impl<T: Scalar> AdjacencyIndex<T> {
    /// Degrees count in-neighbors including the self-loop. A node without
    /// in-neighbors (possible only with self-loops off) is given degree 1 in
    /// the constants so every `c_ij` stays positive.
    pub fn new(g: &Graph<T>, scheme: NormScheme, self_loops: bool) -> Self {
        let n = g.n_nodes();
        let mut neighbors = vec![Vec::new(); n];
        for &(src, dst) in g.edges() {
            neighbors[dst].push(src);
        }
        for (i, list) in neighbors.iter_mut().enumerate() {
            if self_loops {
                list.push(i);
            }
            list.sort_unstable();
            list.dedup();
        }
        let deg: Vec<T> = neighbors
            .iter()
            .map(|l| T::of(l.len().max(1) as f64))
            .collect();
        let norm = neighbors
            .iter()
            .enumerate()
            .map(|(i, list)| {
                list.iter()
                    .map(|&j| match scheme {
                        NormScheme::Symmetric => (deg[i] * deg[j]).sqrt(),
                        NormScheme::Mean => deg[i],
                    })
                    .collect()
            })
            .collect();
        Self { neighbors, norm }
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.neighbors.len()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// `c_ij` aligned with [`neighbors`](Self::neighbors).
    #[inline]
    pub fn norm(&self, i: usize) -> &[T] {
        &self.norm[i]
    }

    /// `c_ij` for a specific pair, if `j ∈ N(i)`.
    pub fn constant(&self, i: usize, j: usize) -> Option<T> {
        self.neighbors[i]
            .binary_search(&j)
            .ok()
            .map(|k| self.norm[i][k])
    }

    pub fn n_entries(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }
}

pub fn normalize_adjacency<T: Scalar>(g: &Graph<T>, scheme: NormScheme, self_loops: bool) -> AdjacencyIndex<T> {
    AdjacencyIndex::new(g, scheme, self_loops)
}

/// A checked bijection on `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(Error::invalid("Permutation::new", "mapping is not a bijection"));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut mapping);
        Self { mapping }
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Self { mapping: inv }
    }

    /// Reorders rows so that row `p(i)` of the result is row `i` of `m`.
    pub fn permute_rows<T: Scalar>(&self, m: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            out.row_mut(self.apply(i)).copy_from_slice(m.row(i));
        }
        out
    }
}
