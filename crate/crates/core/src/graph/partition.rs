// SPDX-License-Identifier: Apache-2.0
use super::{Edge, EdgeList, GraphError};
use crate::{Distance, Rank, VertexId};

/// Block size of the contiguous 1D distribution: `ceil(n / p)`.
fn block_size(n: u64, p: usize) -> u64 {
    n.div_ceil(p as u64).max(1)
}

/// Rank that owns vertex `v` under the block 1D distribution of `n` vertices
/// over `p` ranks.
pub fn owner(v: VertexId, n: u64, p: usize) -> Rank {
    debug_assert!(v < n, "vertex {v} out of range 0..{n}");
    (v / block_size(n, p)) as Rank
}

/// The CSR fragment of the graph stored on one rank.
///
/// Rows cover the owned range `lo..hi`; column entries are global ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalGraph {
    pub n: u64,
    pub rank: Rank,
    pub num_ranks: usize,
    pub lo: VertexId,
    pub hi: VertexId,
    pub row_offsets: Vec<usize>,
    pub col: Vec<VertexId>,
    pub weights: Vec<Distance>,
}

impl LocalGraph {
    pub fn num_local_vertices(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn num_edges(&self) -> usize {
        self.col.len()
    }

    pub fn owns(&self, v: VertexId) -> bool {
        (self.lo..self.hi).contains(&v)
    }

    /// Local row index of an owned vertex.
    #[inline]
    pub fn local_index(&self, v: VertexId) -> usize {
        debug_assert!(self.owns(v));
        (v - self.lo) as usize
    }

    /// Out-edges of an owned vertex as `(target, weight)` pairs.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, Distance)> + '_ {
        let i = self.local_index(v);
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        let i = self.local_index(v);
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    /// Owner of an arbitrary global vertex under this graph's distribution.
    #[inline]
    pub fn owner_of(&self, v: VertexId) -> Rank {
        owner(v, self.n, self.num_ranks)
    }

    /// Flattens the fragment back into an edge sequence, row by row.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (self.lo..self.hi).flat_map(move |v| self.neighbors(v).map(move |(u, w)| Edge::new(v, u, w)))
    }

    #[cfg(test)]
    pub(crate) fn check_invariants(&self) -> bool {
        self.row_offsets.len() == self.num_local_vertices() + 1
            && self.row_offsets[0] == 0
            && self.row_offsets.windows(2).all(|w| w[0] <= w[1])
            && *self.row_offsets.last().unwrap() == self.col.len()
            && self.col.len() == self.weights.len()
    }
}

/// Splits `edges` over `num_ranks` ranks by contiguous vertex blocks and
/// builds one CSR per rank. Within a row, edges keep their input order.
pub fn partition_1d(edges: &EdgeList, num_ranks: usize) -> Result<Vec<LocalGraph>, GraphError> {
    let n = edges.n;
    if num_ranks == 0 || num_ranks as u64 > n {
        return Err(GraphError::TooManyRanks { n, ranks: num_ranks });
    }
    let block = block_size(n, num_ranks);

    let mut degree = vec![0usize; n as usize];
    for e in &edges.edges {
        degree[e.src as usize] += 1;
    }

    (0..num_ranks)
        .map(|rank| {
            let lo = (rank as u64 * block).min(n);
            let hi = ((rank as u64 + 1) * block).min(n);
            let mut row_offsets = Vec::with_capacity((hi - lo) as usize + 1);
            row_offsets.push(0);
            for v in lo..hi {
                row_offsets.push(row_offsets.last().unwrap() + degree[v as usize]);
            }
            let m = *row_offsets.last().unwrap();
            let mut col = vec![0; m];
            let mut weights = vec![0; m];
            let mut cursor = row_offsets.clone();
            for e in edges.edges.iter().filter(|e| (lo..hi).contains(&e.src)) {
                let slot = &mut cursor[(e.src - lo) as usize];
                col[*slot] = e.dst;
                weights[*slot] = e.weight;
                *slot += 1;
            }
            Ok(LocalGraph { n, rank, num_ranks, lo, hi, row_offsets, col, weights })
        })
        .collect()
}
