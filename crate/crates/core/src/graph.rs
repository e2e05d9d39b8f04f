//! Undirected communication topology.
//!
//! Nodes are indexed from 0 in this API. Each undirected edge carries the
//! orientation it was given at construction (tail first), which fixes the
//! sign convention of the incidence matrix.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("edge {edge} ({tail}, {head}) references a node outside 0..{n}")]
    NodeOutOfRange {
        edge: usize,
        tail: usize,
        head: usize,
        n: usize,
    },
    #[error("edge {edge} is a self-loop on node {node}")]
    SelfLoop { edge: usize, node: usize },
    #[error("edge {edge} ({tail}, {head}) duplicates an earlier edge")]
    DuplicateEdge { edge: usize, tail: usize, head: usize },
    #[error("permutation of length {len} does not match {n} nodes")]
    BadPermutation { len: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based `(tail, head)` pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); n];
        for (edge, &(tail, head)) in edges.iter().enumerate() {
            if tail >= n || head >= n {
                return Err(GraphError::NodeOutOfRange { edge, tail, head, n });
            }
            if tail == head {
                return Err(GraphError::SelfLoop { edge, node: tail });
            }
            if !seen.insert((tail.min(head), tail.max(head))) {
                return Err(GraphError::DuplicateEdge { edge, tail, head });
            }
            adjacency[tail].push(head);
            adjacency[head].push(tail);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: edges.to_vec(),
            adjacency,
        })
    }

    /// Builds a graph from 1-based node ids, as used in scenario files.
    pub fn from_one_based_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let shifted: Vec<_> = edges
            .iter()
            .map(|&(a, b)| (a.wrapping_sub(1), b.wrapping_sub(1)))
            .collect();
        Self::from_edges(n, &shifted).map_err(|e| match e {
            GraphError::NodeOutOfRange { edge, n, .. } => GraphError::NodeOutOfRange {
                edge,
                tail: edges[edge].0,
                head: edges[edge].1,
                n,
            },
            other => other,
        })
    }

    /// Path graph on two nodes.
    pub fn k2() -> Self {
        Self::from_edges(2, &[(0, 1)]).expect("valid graph")
    }

    /// Five-node topology: 1–2, 2–3, 2–4, 3–4, 4–5 (1-based).
    pub fn five_node_example() -> Self {
        Self::from_one_based_edges(5, &[(1, 2), (2, 3), (2, 4), (3, 4), (4, 5)]).expect("valid graph")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Oriented edges `(tail, head)` in construction order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbour list of node `i`.
    ///
    /// # Panics
    /// If `i` is not a node of the graph.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        assert!(i < self.n, "node {i} out of range for {} nodes", self.n);
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `B[i][k] = +1` if node `i` is the tail of edge `k`, `−1` if its head.
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let m = self.edges.len();
        let mut entries = vec![0i8; self.n * m];
        for (k, &(tail, head)) in self.edges.iter().enumerate() {
            entries[tail * m + k] = 1;
            entries[head * m + k] = -1;
        }
        IncidenceMatrix { n: self.n, m, entries }
    }

    pub fn connected_components(&self) -> usize {
        let mut component = vec![usize::MAX; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if component[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            component[start] = count;
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if component[v] == usize::MAX {
                        component[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components() == 1
    }

    /// Same undirected graph with the orientation of edge `k` reversed
    /// wherever `flip[k]` is set.
    pub fn reoriented(&self, flip: &[bool]) -> Self {
        let edges: Vec<_> = self
            .edges
            .iter()
            .zip(flip.iter().chain(std::iter::repeat(&false)))
            .map(|(&(t, h), &f)| if f { (h, t) } else { (t, h) })
            .collect();
        Self::from_edges(self.n, &edges).expect("reorientation preserves validity")
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadPermutation {
                len: perm.len(),
                n: self.n,
            });
        }
        let edges: Vec<_> = self.edges.iter().map(|&(t, h)| (perm[t], perm[h])).collect();
        Self::from_edges(self.n, &edges)
    }
}

/// Node-by-edge incidence matrix with entries in {−1, 0, +1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IncidenceMatrix {
    n: usize,
    m: usize,
    entries: Vec<i8>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> usize {
        self.m
    }

    pub fn get(&self, node: usize, edge: usize) -> i8 {
        self.entries[node * self.m + edge]
    }

    pub fn row(&self, node: usize) -> &[i8] {
        &self.entries[node * self.m..(node + 1) * self.m]
    }

    /// `𝟙ᵀB`; all zeros for a valid incidence matrix.
    pub fn column_sums(&self) -> Vec<i32> {
        (0..self.m)
            .map(|k| (0..self.n).map(|i| self.get(i, k) as i32).sum())
            .collect()
    }
}
