// SPDX-License-Identifier: Apache-2.0
//! Deterministic discrete-event transport between simulated ranks.
//!
//! The network is a single event queue ordered by `(deliver_time, seq)`.
//! Delivery delay is additive: a fixed latency, a per-injection overhead and
//! a per-byte cost, plus a rendezvous penalty once a payload crosses the
//! eager threshold. Payloads larger than the threshold are also charged one
//! `chunk_penalty` per extra threshold-sized chunk, which is what produces
//! the cliff just above each multiple of the threshold.
//!
//! Ordering is FIFO per `(src, dst, channel)`: a later send never overtakes
//! an earlier one on the same channel, even when it is smaller.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::{Rank, Time};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NetError {
    #[error("destination rank {dst} out of range (num_ranks = {num_ranks})")]
    BadDestination { dst: Rank, num_ranks: usize },
    #[error("source rank {src} out of range (num_ranks = {num_ranks})")]
    BadSource { src: Rank, num_ranks: usize },
    #[error("empty payload")]
    EmptyPayload,
    #[error("deadlock: event queue idle with {entered} of {expected} ranks in the barrier")]
    Deadlock { entered: usize, expected: usize },
    #[error("rank {0} entered the barrier twice")]
    DuplicateBarrierEntry(Rank),
}

/// Transport cost model. All values are in virtual-time units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetConfig {
    pub base_latency: u64,
    pub byte_cost: u64,
    pub send_overhead: u64,
    pub eager_threshold_bytes: u64,
    pub rendezvous_rtt: u64,
    pub chunk_penalty: u64,
    pub barrier_latency: u64,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            base_latency: 2_000,
            byte_cost: 1,
            send_overhead: 500,
            eager_threshold_bytes: 524_288,
            rendezvous_rtt: 4_000,
            chunk_penalty: 2_000,
            barrier_latency: 5_000,
        }
    }
}

impl NetConfig {
    /// A model where every message arrives instantly.
    pub fn zero() -> Self {
        Self {
            base_latency: 0,
            byte_cost: 0,
            send_overhead: 0,
            eager_threshold_bytes: 524_288,
            rendezvous_rtt: 0,
            chunk_penalty: 0,
            barrier_latency: 0,
        }
    }
}

/// Virtual time between injecting `bytes` and their delivery.
pub fn delivery_delay(bytes: u64, cfg: &NetConfig) -> Time {
    let mut delay = cfg.base_latency + cfg.send_overhead + bytes * cfg.byte_cost;
    if bytes > cfg.eager_threshold_bytes {
        let chunks = bytes.div_ceil(cfg.eager_threshold_bytes);
        delay += cfg.rendezvous_rtt + (chunks - 1) * cfg.chunk_penalty;
    }
    delay
}

/// Logical channel. Priority traffic has its own FIFO and is handled first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    Normal,
    Priority,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub src: Rank,
    pub dst: Rank,
    pub channel: Channel,
    pub payload: Vec<u8>,
    pub inject_time: Time,
    pub deliver_time: Time,
}

#[derive(Debug)]
struct Scheduled {
    deliver_time: Time,
    seq: u64,
    envelope: Envelope,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        (self.deliver_time, self.seq) == (other.deliver_time, other.seq)
    }
}
impl Eq for Scheduled {}
impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.deliver_time, self.seq).cmp(&(other.deliver_time, other.seq))
    }
}

#[derive(Debug, Default)]
struct Barrier {
    expected: usize,
    entered: Vec<bool>,
    count: usize,
    latest_entry: Time,
}

#[derive(Debug)]
pub struct SimNet {
    cfg: NetConfig,
    num_ranks: usize,
    now: Time,
    seq: u64,
    queue: BinaryHeap<Reverse<Scheduled>>,
    // Last delivery time per (src, dst, channel), flattened.
    fifo_tail: Vec<Time>,
    barrier: Option<Barrier>,
    submitted: u64,
    delivered: u64,
}

impl SimNet {
    pub fn new(num_ranks: usize, cfg: NetConfig) -> Self {
        Self {
            cfg,
            num_ranks,
            now: 0,
            seq: 0,
            queue: BinaryHeap::new(),
            fifo_tail: vec![0; num_ranks * num_ranks * 2],
            barrier: None,
            submitted: 0,
            delivered: 0,
        }
    }

    pub fn config(&self) -> &NetConfig {
        &self.cfg
    }

    pub fn num_ranks(&self) -> usize {
        self.num_ranks
    }

    pub fn now(&self) -> Time {
        self.now
    }

    /// Moves the clock forward to `t`. Earlier times are ignored.
    pub fn advance_to(&mut self, t: Time) {
        self.now = self.now.max(t);
    }

    /// Schedules `payload` for delivery at `now + delivery_delay`. The sender
    /// never blocks. Returns the scheduled delivery time.
    pub fn submit_send(&mut self, src: Rank, dst: Rank, channel: Channel, payload: Vec<u8>) -> Result<Time, NetError> {
        self.submit_send_at(src, dst, channel, payload, self.now)
    }

    /// Like [`submit_send`](Self::submit_send) but injected at the sender's
    /// local time `at`, which may run ahead of the global clock.
    pub fn submit_send_at(
        &mut self,
        src: Rank,
        dst: Rank,
        channel: Channel,
        payload: Vec<u8>,
        at: Time,
    ) -> Result<Time, NetError> {
        let at = at.max(self.now);
        if src >= self.num_ranks {
            return Err(NetError::BadSource { src, num_ranks: self.num_ranks });
        }
        if dst >= self.num_ranks {
            return Err(NetError::BadDestination { dst, num_ranks: self.num_ranks });
        }
        if payload.is_empty() {
            return Err(NetError::EmptyPayload);
        }
        let lane = (src * self.num_ranks + dst) * 2 + channel as usize;
        let earliest = at + delivery_delay(payload.len() as u64, &self.cfg);
        let deliver_time = earliest.max(self.fifo_tail[lane]);
        self.fifo_tail[lane] = deliver_time;

        let envelope = Envelope { src, dst, channel, payload, inject_time: at, deliver_time };
        self.queue.push(Reverse(Scheduled { deliver_time, seq: self.seq, envelope }));
        self.seq += 1;
        self.submitted += 1;
        Ok(deliver_time)
    }

    /// Delivery time of the next envelope, if any.
    pub fn peek_time(&self) -> Option<Time> {
        self.queue.peek().map(|Reverse(s)| s.deliver_time)
    }

    /// Pops the earliest envelope and advances the clock to its delivery time.
    pub fn step(&mut self) -> Option<Envelope> {
        let Reverse(next) = self.queue.pop()?;
        self.now = self.now.max(next.deliver_time);
        self.delivered += 1;
        Some(next.envelope)
    }

    pub fn in_flight(&self) -> usize {
        self.queue.len()
    }

    pub fn submitted(&self) -> u64 {
        self.submitted
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    /// Opens a barrier over `participants` ranks.
    pub fn open_barrier(&mut self, participants: usize) {
        self.barrier = Some(Barrier {
            expected: participants,
            entered: vec![false; self.num_ranks.max(participants)],
            count: 0,
            latest_entry: 0,
        });
    }

    /// Records `rank` entering the open barrier at time `at`. When the last
    /// participant arrives, returns the release time (latest entry plus
    /// `barrier_latency`) and closes the barrier.
    pub fn enter_barrier(&mut self, rank: Rank, at: Time) -> Result<Option<Time>, NetError> {
        let latency = self.cfg.barrier_latency;
        let barrier = self.barrier.get_or_insert_with(|| Barrier {
            expected: 1,
            entered: vec![false; rank + 1],
            ..Default::default()
        });
        if barrier.entered.len() <= rank {
            barrier.entered.resize(rank + 1, false);
        }
        if barrier.entered[rank] {
            return Err(NetError::DuplicateBarrierEntry(rank));
        }
        barrier.entered[rank] = true;
        barrier.count += 1;
        barrier.latest_entry = barrier.latest_entry.max(at);
        if barrier.count == barrier.expected {
            let release = barrier.latest_entry + latency;
            self.barrier = None;
            self.advance_to(release);
            Ok(Some(release))
        } else {
            Ok(None)
        }
    }

    /// Convenience: every participant enters at the given times.
    pub fn barrier(&mut self, entries: &[(Rank, Time)]) -> Result<Time, NetError> {
        self.open_barrier(entries.len());
        let mut release = None;
        for &(rank, at) in entries {
            release = self.enter_barrier(rank, at)?;
        }
        match release {
            Some(t) => Ok(t),
            None => self.check_idle().map(|_| self.now),
        }
    }

    /// Fails if the event queue is empty while a barrier is only partly
    /// entered: nothing can ever release it.
    pub fn check_idle(&self) -> Result<(), NetError> {
        match &self.barrier {
            Some(b) if self.queue.is_empty() && b.count < b.expected => {
                Err(NetError::Deadlock { entered: b.count, expected: b.expected })
            }
            _ => Ok(()),
        }
    }
}
