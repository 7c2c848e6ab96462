// SPDX-License-Identifier: Apache-2.0
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::EdgeList;
use crate::{Distance, VertexId, INFINITY};

/// Sequential binary-heap Dijkstra on the whole, unpartitioned graph.
pub fn dijkstra_reference(edges: &EdgeList, source: VertexId) -> Vec<Distance> {
    let n = edges.n as usize;
    let mut offsets = vec![0usize; n + 1];
    for e in &edges.edges {
        offsets[e.src as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut adj = vec![(0u64, 0u32); edges.len()];
    let mut cursor = offsets.clone();
    for e in &edges.edges {
        adj[cursor[e.src as usize]] = (e.dst, e.weight);
        cursor[e.src as usize] += 1;
    }

    let mut dist = vec![INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0, source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for &(u, w) in &adj[offsets[v as usize]..offsets[v as usize + 1]] {
            let nd = d.saturating_add(w);
            if nd < dist[u as usize] {
                dist[u as usize] = nd;
                heap.push(Reverse((nd, u)));
            }
        }
    }
    dist
}
