// SPDX-License-Identifier: Apache-2.0
use super::DistanceMessage;
use crate::{Distance, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheVerdict {
    Pass,
    Drop,
}

/// Send-side, direct-mapped, write-through reduction cache.
///
/// Slot `vertex % capacity` remembers the smallest distance sent for the
/// vertex currently occupying it. A message that does not improve on it is
/// dropped; anything else overwrites the slot and goes out.
#[derive(Debug, Clone)]
pub struct ReductionCache {
    slots: Vec<Option<(VertexId, Distance)>>,
    drops: u64,
}

impl ReductionCache {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "cache capacity must be positive");
        Self { slots: vec![None; capacity], drops: 0 }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn drops(&self) -> u64 {
        self.drops
    }

    pub fn filter(&mut self, msg: DistanceMessage) -> CacheVerdict {
        let idx = (msg.vertex % self.slots.len() as u64) as usize;
        let slot = &mut self.slots[idx];
        match slot {
            Some((v, d)) if *v == msg.vertex && *d <= msg.distance => {
                self.drops += 1;
                CacheVerdict::Drop
            }
            _ => {
                *slot = Some((msg.vertex, msg.distance));
                CacheVerdict::Pass
            }
        }
    }

    pub fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = None);
    }
}
