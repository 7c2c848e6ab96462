// SPDX-License-Identifier: Apache-2.0
//! Counting-based quiescence detection over non-blocking reduction rounds.
//!
//! Every idle rank contributes its epoch send/receive counters to the current
//! round. A round completes once all ranks have contributed, one reduction
//! latency after the last contribution. The epoch has terminated when two
//! consecutive completed rounds observe the same `(sent, received)` totals,
//! the totals are equal and no rank reported local work.
//!
//! The epoch opens with a virtual round observing `(0, 0)`: before any rank
//! has contributed nothing has been sent, so an epoch in which no message is
//! ever sent terminates after its first real round.

use crate::{Rank, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contribution {
    pub sent: u64,
    pub received: u64,
    pub has_work: bool,
    pub at: Time,
}

/// Reduced totals of one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundTotals {
    pub sent: u64,
    pub received: u64,
    pub any_work: bool,
}

/// The two-consecutive-stable-rounds rule.
pub fn detect_termination(previous: Option<(u64, u64)>, current: RoundTotals) -> bool {
    current.sent == current.received && !current.any_work && previous == Some((current.sent, current.received))
}

#[derive(Debug, Clone)]
pub struct TerminationDetector {
    latency: Time,
    round: u64,
    opened_at: Time,
    contributions: Vec<Option<Contribution>>,
    contributed: usize,
    previous: Option<(u64, u64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundOutcome {
    Terminated { at: Time },
    Continue { next_round_opens: Time },
}

impl TerminationDetector {
    pub fn new(num_ranks: usize, latency: Time, epoch_start: Time) -> Self {
        Self {
            latency,
            round: 0,
            opened_at: epoch_start,
            contributions: vec![None; num_ranks],
            contributed: 0,
            previous: Some((0, 0)),
        }
    }

    /// Completed rounds so far.
    pub fn rounds(&self) -> u64 {
        self.round
    }

    /// Earliest time a rank may contribute to the current round.
    pub fn opened_at(&self) -> Time {
        self.opened_at
    }

    pub fn has_contributed(&self, rank: Rank) -> bool {
        self.contributions[rank].is_some()
    }

    pub fn contribute(&mut self, rank: Rank, mut c: Contribution) {
        debug_assert!(self.contributions[rank].is_none(), "rank {rank} contributed twice");
        c.at = c.at.max(self.opened_at);
        if self.contributions[rank].replace(c).is_none() {
            self.contributed += 1;
        }
    }

    /// Completion time of the current round, once every rank contributed.
    pub fn ready_at(&self) -> Option<Time> {
        (self.contributed == self.contributions.len())
            .then(|| self.contributions.iter().flatten().map(|c| c.at).max().unwrap_or(self.opened_at) + self.latency)
    }

    /// Evaluates the completed round and opens the next one.
    pub fn conclude(&mut self) -> RoundOutcome {
        let at = self.ready_at().expect("round concluded before all ranks contributed");
        let totals = self.contributions.iter().flatten().fold(
            RoundTotals { sent: 0, received: 0, any_work: false },
            |acc, c| RoundTotals {
                sent: acc.sent + c.sent,
                received: acc.received + c.received,
                any_work: acc.any_work || c.has_work,
            },
        );
        let done = detect_termination(self.previous, totals);
        self.previous = Some((totals.sent, totals.received));
        self.round += 1;
        self.opened_at = at;
        self.contributions.iter_mut().for_each(|c| *c = None);
        self.contributed = 0;
        if done {
            RoundOutcome::Terminated { at }
        } else {
            RoundOutcome::Continue { next_round_opens: at }
        }
    }

    pub fn last_totals(&self) -> Option<(u64, u64)> {
        self.previous
    }
}
