//! Finite undirected simple graphs and their adjacency / Laplacian operators.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::CMatrix;

/// Undirected graph without self-loops. Edges are stored as `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// On-disk form: `{"n": 4, "edges": [[0, 1], ...]}` with 0-based vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    /// Validates and deduplicates the edge list. `(u, v)` and `(v, u)` are the same edge.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self { n, edges: set })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        Self::new(json.n, json.edges.iter().map(|e| (e[0], e[1])))
    }
}

/// The `n`-cycle with edges `(j, j+1 mod n)`.
pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::TooSmall {
            what: "cycle length",
            min: 3,
            got: n,
        });
    }
    Graph::new(n, (0..n).map(|j| (j, (j + 1) % n)))
}

/// Complete graph on `n` vertices.
pub fn complete_graph(n: usize) -> Result<Graph> {
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// Path `0 − 1 − … − (n−1)`.
pub fn path_graph(n: usize) -> Result<Graph> {
    Graph::new(n, (1..n).map(|j| (j - 1, j)))
}

/// Cartesian product `g1 □ g2`, vertex `(a, b)` stored at index `a·n2 + b`.
pub fn cartesian_product(g1: &Graph, g2: &Graph) -> Graph {
    let n2 = g2.n;
    let mut edges = BTreeSet::new();
    for a in 0..g1.n {
        for &(b, b2) in &g2.edges {
            edges.insert((a * n2 + b, a * n2 + b2));
        }
    }
    for &(a, a2) in &g1.edges {
        for b in 0..n2 {
            edges.insert((a * n2 + b, a2 * n2 + b));
        }
    }
    Graph {
        n: g1.n * n2,
        edges,
    }
}

fn integer_adjacency(g: &Graph) -> Vec<i64> {
    let mut a = vec![0i64; g.n * g.n];
    for &(u, v) in &g.edges {
        a[u * g.n + v] = 1;
        a[v * g.n + u] = 1;
    }
    a
}

fn to_matrix(n: usize, entries: &[i64]) -> CMatrix {
    CMatrix::from_fn(n, n, |r, col| (entries[r * n + col] as f64).into())
}

/// Symmetric 0/1 adjacency matrix with zero diagonal.
pub fn adjacency(g: &Graph) -> CMatrix {
    to_matrix(g.n, &integer_adjacency(g))
}

/// `L = A − diag(deg)`; assembled in integers so row and column sums are exactly zero.
pub fn laplacian(g: &Graph) -> CMatrix {
    let mut l = integer_adjacency(g);
    for (j, d) in g.degrees().into_iter().enumerate() {
        l[j * g.n + j] = -(d as i64);
    }
    to_matrix(g.n, &l)
}

/// Common degree of a regular graph, `None` otherwise.
pub fn regular_degree(g: &Graph) -> Option<usize> {
    let deg = g.degrees();
    let first = deg[0];
    deg.iter().all(|&d| d == first).then_some(first)
}
