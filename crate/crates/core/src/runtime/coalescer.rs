// SPDX-License-Identifier: Apache-2.0
use super::DistanceMessage;
use crate::Rank;

/// Per-destination coalescing buffers of fixed message capacity.
#[derive(Debug, Clone)]
pub struct Coalescer {
    capacity: usize,
    buffers: Vec<Vec<DistanceMessage>>,
}

impl Coalescer {
    pub fn new(num_ranks: usize, capacity: usize) -> Self {
        assert!(capacity >= 1, "coalescing capacity must be at least 1");
        Self { capacity, buffers: (0..num_ranks).map(|_| Vec::new()).collect() }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Appends `msg` to the buffer for `dst`. Returns the buffer contents
    /// when this append filled it.
    pub fn push(&mut self, dst: Rank, msg: DistanceMessage) -> Option<Vec<DistanceMessage>> {
        let buf = &mut self.buffers[dst];
        if buf.capacity() == 0 {
            buf.reserve_exact(self.capacity.min(4096));
        }
        buf.push(msg);
        (buf.len() == self.capacity).then(|| std::mem::take(buf))
    }

    pub fn pending(&self, dst: Rank) -> usize {
        self.buffers[dst].len()
    }

    pub fn total_pending(&self) -> usize {
        self.buffers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.buffers.iter().all(Vec::is_empty)
    }

    /// Takes every non-empty buffer, in destination order.
    pub fn take_partials(&mut self) -> Vec<(Rank, Vec<DistanceMessage>)> {
        self.buffers
            .iter_mut()
            .enumerate()
            .filter(|(_, b)| !b.is_empty())
            .map(|(dst, b)| (dst, std::mem::take(b)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fills_at_capacity() {
        let mut c = Coalescer::new(2, 2);
        assert!(c.push(1, DistanceMessage::new(5, 1)).is_none());
        let full = c.push(1, DistanceMessage::new(6, 2)).unwrap();
        assert_eq!(full.len(), 2);
        assert!(c.is_empty());
    }

    #[test]
    fn capacity_one_emits_every_push() {
        let mut c = Coalescer::new(3, 1);
        for i in 0..5 {
            assert_eq!(c.push(i % 3, DistanceMessage::new(i as u64, 0)).map(|b| b.len()), Some(1));
        }
        assert!(c.take_partials().is_empty());
    }

    #[test]
    fn partials_in_destination_order() {
        let mut c = Coalescer::new(3, 100);
        c.push(2, DistanceMessage::new(1, 1));
        c.push(0, DistanceMessage::new(2, 1));
        c.push(2, DistanceMessage::new(3, 1));
        assert_eq!(c.total_pending(), 3);
        let parts = c.take_partials();
        assert_eq!(parts.iter().map(|(d, b)| (*d, b.len())).collect::<Vec<_>>(), vec![(0, 1), (2, 2)]);
        assert!(c.is_empty());
    }
}
