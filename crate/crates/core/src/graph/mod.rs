// SPDX-License-Identifier: Apache-2.0
//! Weighted directed graphs: generation, text I/O and 1D partitioning.

mod io;
mod kronecker;
mod partition;

pub use io::{load_edge_list, parse_edge_list, write_edge_list};
pub use kronecker::{generate_kronecker, kronecker_samples, KRONECKER_INITIATOR, MAX_SCALE};
pub use partition::{owner, partition_1d, LocalGraph};

use crate::{Distance, VertexId};

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("scale {0} exceeds the maximum of {MAX_SCALE}")]
    ScaleTooLarge(u32),
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("cannot split {n} vertices across {ranks} ranks")]
    TooManyRanks { n: u64, ranks: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Validation { line: usize, msg: String },
    #[error("no edges")]
    NoEdges,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One directed, weighted edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: Distance,
}

impl Edge {
    pub fn new(src: VertexId, dst: VertexId, weight: Distance) -> Self {
        Self { src, dst, weight }
    }
}

/// A flat edge list over vertices `0..n`, where `n` is a power of two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub n: u64,
    pub edges: Vec<Edge>,
}

impl EdgeList {
    pub fn new(n: u64, edges: Vec<Edge>) -> Self {
        Self { n, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn max_weight(&self) -> Distance {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }

    /// Adds the reverse of every edge, keeping its weight.
    pub fn symmetrize(&self) -> EdgeList {
        let mut edges = Vec::with_capacity(self.edges.len() * 2);
        for e in &self.edges {
            edges.push(*e);
            edges.push(Edge::new(e.dst, e.src, e.weight));
        }
        EdgeList::new(self.n, edges)
    }

    /// Same topology with every weight replaced by 1.
    pub fn with_unit_weights(&self) -> EdgeList {
        let edges = self.edges.iter().map(|e| Edge::new(e.src, e.dst, 1)).collect();
        EdgeList::new(self.n, edges)
    }

    pub fn out_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n as usize];
        for e in &self.edges {
            deg[e.src as usize] += 1;
        }
        deg
    }
}
