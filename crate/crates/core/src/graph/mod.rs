//! Undirected weighted graphs and their combinatorial Laplacian.

mod io;
mod laplacian;
mod sbm;

use std::collections::HashMap;

pub use io::{load_graph, parse_edge_list, save_graph, write_edge_list, GraphFormat};
pub use laplacian::{Laplacian, SymmetricOperator};
pub use sbm::{detectability_threshold, generate_sbm, SbmConfig, SbmProbabilities};

use crate::error::{Error, Result};

/// An undirected graph with non-negative edge weights and no self-loops.
///
/// Each undirected edge is stored once as `(i, j, w)` with `i < j`, sorted
/// lexicographically; the adjacency matrix it represents is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    /// Builds a graph from an edge list.
    ///
    /// An edge may be listed in both orientations as long as the weights
    /// agree; listing the same orientation twice is an error.
    pub fn new(
        n_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::InvalidArgument(
                "graph must have at least one node".into(),
            ));
        }
        // (min, max) -> (weight, listed as i<j, listed as i>j)
        let mut seen: HashMap<(usize, usize), (f64, bool, bool)> = HashMap::new();
        for (i, j, w) in edges {
            for idx in [i, j] {
                if idx >= n_nodes {
                    return Err(Error::NodeOutOfRange {
                        index: idx,
                        n_nodes,
                    });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight { i, j, weight: w });
            }
            let key = (i.min(j), i.max(j));
            let forward = i < j;
            match seen.get_mut(&key) {
                None => {
                    seen.insert(key, (w, forward, !forward));
                }
                Some(entry) => {
                    let already = if forward { entry.1 } else { entry.2 };
                    if already {
                        return Err(Error::DuplicateEdge { i, j });
                    }
                    if entry.0 != w {
                        return Err(Error::ConflictingWeight {
                            i: key.0,
                            j: key.1,
                            first: entry.0,
                            second: w,
                        });
                    }
                    if forward {
                        entry.1 = true;
                    } else {
                        entry.2 = true;
                    }
                }
            }
        }
        let mut edges: Vec<_> = seen
            .into_iter()
            .map(|((i, j), (w, _, _))| (i, j, w))
            .collect();
        edges.sort_by_key(|e| (e.0, e.1));
        Ok(Self { n_nodes, edges })
    }

    /// Unit-weight graph from pairs.
    pub fn unweighted(
        n_nodes: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::new(n_nodes, pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Undirected edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Weighted degree of every node.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_nodes];
        for &(i, j, w) in &self.edges {
            d[i] += w;
            d[j] += w;
        }
        d
    }

    pub fn average_degree(&self) -> f64 {
        self.degrees().iter().sum::<f64>() / self.n_nodes as f64
    }

    pub fn laplacian(&self) -> Laplacian {
        build_laplacian(self)
    }

    /// Path graph `0 - 1 - ... - (n-1)` with unit weights.
    pub fn path(n: usize) -> Result<Self> {
        Self::unweighted(n, (1..n).map(|i| (i - 1, i)))
    }

    /// Cycle graph on `n >= 3` nodes with unit weights.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(
                "a cycle needs at least 3 nodes".into(),
            ));
        }
        Self::unweighted(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Complete graph with unit weights.
    pub fn complete(n: usize) -> Result<Self> {
        Self::unweighted(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    /// Star graph: node 0 linked to every other node.
    pub fn star(n: usize) -> Result<Self> {
        Self::unweighted(n, (1..n).map(|j| (0, j)))
    }

    /// Disjoint union of complete graphs of the given sizes.
    pub fn cliques(sizes: &[usize]) -> Result<Self> {
        let n: usize = sizes.iter().sum();
        let mut pairs = Vec::new();
        let mut offset = 0;
        for &s in sizes {
            for i in 0..s {
                for j in i + 1..s {
                    pairs.push((offset + i, offset + j));
                }
            }
            offset += s;
        }
        Self::unweighted(n, pairs)
    }
}

/// Combinatorial Laplacian `L = D - W` in compressed sparse row form.
pub fn build_laplacian(g: &Graph) -> Laplacian {
    Laplacian::from_graph(g)
}
