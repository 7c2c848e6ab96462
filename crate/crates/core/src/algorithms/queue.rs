// SPDX-License-Identifier: Apache-2.0
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::{Distance, VertexId};

/// Rank-private min-queue of `(distance, vertex)` tasks.
#[derive(Debug, Clone, Default)]
pub struct LocalWorkQueue {
    heap: BinaryHeap<Reverse<(Distance, VertexId)>>,
}

impl LocalWorkQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, distance: Distance, vertex: VertexId) {
        self.heap.push(Reverse((distance, vertex)));
    }

    /// Smallest task by distance, then vertex id.
    pub fn pop(&mut self) -> Option<(Distance, VertexId)> {
        self.heap.pop().map(|Reverse(t)| t)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

pub fn bucket_index(distance: Distance, delta: u32) -> usize {
    (distance / delta) as usize
}

/// Delta-stepping buckets as growable arrays of `(vertex, distance)` entries.
///
/// Entries are never removed when a vertex moves to a lower bucket; stale
/// entries are recognised on removal by comparing against the tentative
/// distance.
#[derive(Debug, Clone)]
pub struct BucketStore {
    delta: u32,
    buckets: Vec<Vec<(VertexId, Distance)>>,
}

impl BucketStore {
    pub fn new(delta: u32) -> Self {
        assert!(delta >= 1);
        Self { delta, buckets: Vec::new() }
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn insert(&mut self, vertex: VertexId, distance: Distance) {
        let i = bucket_index(distance, self.delta);
        if i >= self.buckets.len() {
            self.buckets.resize_with(i + 1, Vec::new);
        }
        self.buckets[i].push((vertex, distance));
    }

    pub fn pop(&mut self, bucket: usize) -> Option<(VertexId, Distance)> {
        self.buckets.get_mut(bucket)?.pop()
    }

    pub fn len_of(&self, bucket: usize) -> usize {
        self.buckets.get(bucket).map_or(0, Vec::len)
    }

    pub fn total(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    /// Lowest bucket at or above `from` holding a live entry, where `live`
    /// tells whether an entry still matches its vertex's tentative distance.
    /// Buckets skipped on the way hold only stale entries and are emptied;
    /// the number of entries discarded is returned alongside.
    pub fn first_live(&mut self, from: usize, live: impl Fn(VertexId, Distance) -> bool) -> (Option<usize>, u64) {
        let mut discarded = 0;
        for i in from..self.buckets.len() {
            if self.buckets[i].iter().any(|&(v, d)| live(v, d)) {
                return (Some(i), discarded);
            }
            discarded += self.buckets[i].len() as u64;
            self.buckets[i].clear();
        }
        (None, discarded)
    }
}
