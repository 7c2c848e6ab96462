// SPDX-License-Identifier: Apache-2.0
//! Active-message runtime over [`SimNet`].
//!
//! Each rank owns per-destination coalescing buffers, an optional reduction
//! cache and an inbox. Algorithms implement [`RankProgram`]: a loop body that
//! consumes local work and a handler for delivered messages. [`Runtime::run_epoch`]
//! drives all ranks cooperatively in virtual time until quiescence.
//!
//! Scheduling is conservative: the next event is always the earliest of the
//! next network delivery, the earliest rank action and the completion of the
//! current termination round, with deliveries winning ties and ranks breaking
//! ties by index. A rank's loop iteration costs `iteration_cost` and each
//! progress call `progress_cost`; sends are stamped with the rank's local
//! clock at the moment they are injected.

mod cache;
mod coalescer;
mod config;
mod message;
mod termination;

use std::collections::VecDeque;

pub use cache::{CacheVerdict, ReductionCache};
pub use coalescer::Coalescer;
pub use config::{RuntimeConfig, EL_UNBOUNDED};
pub use message::{deserialize, serialize, CorruptPayload, DistanceMessage, WIRE_SIZE};
pub use termination::{detect_termination, Contribution, RoundOutcome, RoundTotals, TerminationDetector};

pub use crate::simnet::Channel;
use crate::simnet::{Envelope, NetError, SimNet};
use crate::{Rank, Time};

#[derive(Debug, thiserror::Error)]
pub enum RuntimeError {
    #[error("invalid runtime configuration: {0}")]
    InvalidConfig(String),
    #[error("send from rank {0} outside an open epoch")]
    EpochClosed(Rank),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("rank {rank}: {source}")]
    Corrupt { rank: Rank, source: CorruptPayload },
    #[error(
        "livelock guard: epoch exceeded horizon at t={time} after {rounds} termination rounds \
         (sent={sent}, received={received}, in flight={in_flight}, local work={local_work})"
    )]
    Livelock { time: Time, rounds: u64, sent: u64, received: u64, in_flight: usize, local_work: usize },
    #[error("scheduler stalled at t={0} with no pending events")]
    Stalled(Time),
    #[error("epoch closed with an inconsistent state: {0}")]
    Invariant(String),
    #[error("{0}")]
    Algorithm(String),
}

/// The per-rank half of an algorithm.
pub trait RankProgram {
    /// Size of the rank's local work queue.
    fn local_work(&self, rank: Rank) -> usize;

    /// One iteration of the loop body. Called only when `local_work > 0`.
    fn step(&mut self, rank: Rank, ctx: &mut RankCtx<'_>) -> Result<(), RuntimeError>;

    /// Active-message handler for a message delivered to `rank`.
    fn handle(
        &mut self,
        rank: Rank,
        msg: DistanceMessage,
        channel: Channel,
        ctx: &mut RankCtx<'_>,
    ) -> Result<(), RuntimeError>;
}

/// Cumulative runtime counters of one rank, or their sum over ranks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuntimeCounters {
    pub messages_sent: u64,
    pub messages_received: u64,
    pub full_buffers: u64,
    pub partial_buffers: u64,
    pub partial_messages: u64,
    pub priority_buffers: u64,
    pub priority_messages: u64,
    pub local_deliveries: u64,
    pub cache_drops: u64,
    pub progress_calls: u64,
    pub loop_progress_calls: u64,
    pub iterations: u64,
}

impl std::ops::AddAssign for RuntimeCounters {
    fn add_assign(&mut self, o: Self) {
        self.messages_sent += o.messages_sent;
        self.messages_received += o.messages_received;
        self.full_buffers += o.full_buffers;
        self.partial_buffers += o.partial_buffers;
        self.partial_messages += o.partial_messages;
        self.priority_buffers += o.priority_buffers;
        self.priority_messages += o.priority_messages;
        self.local_deliveries += o.local_deliveries;
        self.cache_drops += o.cache_drops;
        self.progress_calls += o.progress_calls;
        self.loop_progress_calls += o.loop_progress_calls;
        self.iterations += o.iterations;
    }
}

#[derive(Debug)]
struct RankState {
    clock: Time,
    next_flush: Time,
    coalescer: Coalescer,
    priority: Coalescer,
    cache: Option<ReductionCache>,
    inbox: VecDeque<Envelope>,
    priority_inbox: VecDeque<Envelope>,
    loopback: VecDeque<DistanceMessage>,
    epoch_sent: u64,
    epoch_received: u64,
    counters: RuntimeCounters,
}

impl RankState {
    fn new(cfg: &RuntimeConfig) -> Self {
        Self {
            clock: 0,
            next_flush: cfg.flush_period,
            coalescer: Coalescer::new(cfg.num_ranks, cfg.coalescing_size),
            priority: Coalescer::new(cfg.num_ranks, cfg.priority_capacity()),
            cache: (cfg.cache_capacity > 0).then(|| ReductionCache::new(cfg.cache_capacity)),
            inbox: VecDeque::new(),
            priority_inbox: VecDeque::new(),
            loopback: VecDeque::new(),
            epoch_sent: 0,
            epoch_received: 0,
            counters: RuntimeCounters::default(),
        }
    }

    fn buffers_empty(&self) -> bool {
        self.coalescer.is_empty() && self.priority.is_empty()
    }

    fn inbox_empty(&self) -> bool {
        self.inbox.is_empty() && self.priority_inbox.is_empty()
    }

    fn earliest_inbox(&self) -> Option<Time> {
        let a = self.inbox.front().map(|e| e.deliver_time);
        let b = self.priority_inbox.front().map(|e| e.deliver_time);
        a.into_iter().chain(b).min()
    }
}

/// Send-side handle given to loop bodies and handlers.
pub struct RankCtx<'a> {
    rank: Rank,
    now: Time,
    cfg: &'a RuntimeConfig,
    state: &'a mut RankState,
    net: &'a mut SimNet,
}

impl RankCtx<'_> {
    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// Local virtual time at which sends from this call are injected.
    pub fn now(&self) -> Time {
        self.now
    }

    pub fn config(&self) -> &RuntimeConfig {
        self.cfg
    }

    /// Active-message send on the normal channel.
    pub fn send(&mut self, msg: DistanceMessage, dst: Rank) -> Result<(), RuntimeError> {
        self.send_on(msg, dst, Channel::Normal)
    }

    /// Sends on the priority channel when priority messaging is enabled,
    /// otherwise on the normal one.
    pub fn send_priority(&mut self, msg: DistanceMessage, dst: Rank) -> Result<(), RuntimeError> {
        let channel = if self.cfg.priority_messages { Channel::Priority } else { Channel::Normal };
        self.send_on(msg, dst, channel)
    }

    fn send_on(&mut self, msg: DistanceMessage, dst: Rank, channel: Channel) -> Result<(), RuntimeError> {
        if dst >= self.cfg.num_ranks {
            return Err(NetError::BadDestination { dst, num_ranks: self.cfg.num_ranks }.into());
        }
        if self.cfg.self_send_check && dst == self.rank {
            self.state.loopback.push_back(msg);
            self.state.counters.local_deliveries += 1;
            return Ok(());
        }
        if let Some(cache) = self.state.cache.as_mut() {
            if cache.filter(msg) == CacheVerdict::Drop {
                self.state.counters.cache_drops += 1;
                return Ok(());
            }
        }
        let full = match channel {
            Channel::Normal => self.state.coalescer.push(dst, msg),
            Channel::Priority => self.state.priority.push(dst, msg),
        };
        if let Some(buf) = full {
            match channel {
                Channel::Normal => self.state.counters.full_buffers += 1,
                Channel::Priority => self.state.counters.priority_buffers += 1,
            }
            self.submit(dst, channel, &buf)?;
        }
        Ok(())
    }

    fn submit(&mut self, dst: Rank, channel: Channel, msgs: &[DistanceMessage]) -> Result<(), RuntimeError> {
        self.net.submit_send_at(self.rank, dst, channel, serialize(msgs), self.now)?;
        let n = msgs.len() as u64;
        self.state.epoch_sent += n;
        self.state.counters.messages_sent += n;
        if channel == Channel::Priority {
            self.state.counters.priority_messages += n;
        }
        Ok(())
    }

    /// Submits every non-empty, non-full buffer. Returns the number of
    /// buffers submitted.
    fn flush_partials(&mut self) -> Result<usize, RuntimeError> {
        let mut flushed = 0;
        for (dst, buf) in self.state.priority.take_partials() {
            self.state.counters.priority_buffers += 1;
            self.submit(dst, Channel::Priority, &buf)?;
            flushed += 1;
        }
        for (dst, buf) in self.state.coalescer.take_partials() {
            self.state.counters.partial_buffers += 1;
            self.state.counters.partial_messages += buf.len() as u64;
            self.submit(dst, Channel::Normal, &buf)?;
            flushed += 1;
        }
        Ok(flushed)
    }

    fn drain_loopback<P: RankProgram>(&mut self, program: &mut P) -> Result<(), RuntimeError> {
        while let Some(msg) = self.state.loopback.pop_front() {
            program.handle(self.rank, msg, Channel::Normal, self)?;
        }
        Ok(())
    }

    fn progress<P: RankProgram>(&mut self, program: &mut P) -> Result<usize, RuntimeError> {
        self.state.counters.progress_calls += 1;
        let mut handled = 0;
        loop {
            let env = match self.state.priority_inbox.pop_front() {
                Some(env) => env,
                None => match self.state.inbox.pop_front() {
                    Some(env) => env,
                    None => break,
                },
            };
            let msgs = deserialize(&env.payload).map_err(|source| RuntimeError::Corrupt { rank: self.rank, source })?;
            for msg in msgs {
                self.state.epoch_received += 1;
                self.state.counters.messages_received += 1;
                handled += 1;
                program.handle(self.rank, msg, env.channel, self)?;
                self.drain_loopback(program)?;
            }
        }
        Ok(handled)
    }
}

/// Summary of one completed epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochReport {
    pub start: Time,
    pub end: Time,
    pub rounds: u64,
    pub messages_sent: u64,
    pub messages_received: u64,
}

pub struct Runtime {
    cfg: RuntimeConfig,
    net: SimNet,
    ranks: Vec<RankState>,
    epoch_open: bool,
    epochs: u64,
    rounds: u64,
}

impl Runtime {
    pub fn new(cfg: RuntimeConfig) -> Result<Self, RuntimeError> {
        cfg.validate().map_err(RuntimeError::InvalidConfig)?;
        let net = SimNet::new(cfg.num_ranks, cfg.net.clone());
        let ranks = (0..cfg.num_ranks).map(|_| RankState::new(&cfg)).collect();
        Ok(Self { cfg, net, ranks, epoch_open: false, epochs: 0, rounds: 0 })
    }

    pub fn config(&self) -> &RuntimeConfig {
        &self.cfg
    }

    pub fn num_ranks(&self) -> usize {
        self.cfg.num_ranks
    }

    /// Latest local clock over all ranks.
    pub fn now(&self) -> Time {
        self.ranks.iter().map(|r| r.clock).max().unwrap_or(0).max(self.net.now())
    }

    pub fn clock(&self, rank: Rank) -> Time {
        self.ranks[rank].clock
    }

    pub fn net(&self) -> &SimNet {
        &self.net
    }

    pub fn epochs(&self) -> u64 {
        self.epochs
    }

    pub fn termination_rounds(&self) -> u64 {
        self.rounds
    }

    pub fn counters(&self, rank: Rank) -> RuntimeCounters {
        self.ranks[rank].counters
    }

    /// Counters summed over ranks.
    pub fn total_counters(&self) -> RuntimeCounters {
        let mut total = RuntimeCounters::default();
        for r in &self.ranks {
            total += r.counters;
        }
        total
    }

    pub fn pending_in_buffers(&self, rank: Rank) -> usize {
        let s = &self.ranks[rank];
        s.coalescer.total_pending() + s.priority.total_pending()
    }

    pub fn open_epoch(&mut self) {
        let start = self.now();
        for r in &mut self.ranks {
            r.clock = start;
            r.next_flush = start + self.cfg.flush_period;
            r.epoch_sent = 0;
            r.epoch_received = 0;
        }
        self.net.advance_to(start);
        self.epoch_open = true;
    }

    pub fn close_epoch(&mut self) {
        self.epoch_open = false;
    }

    fn ctx(&mut self, rank: Rank) -> RankCtx<'_> {
        let state = &mut self.ranks[rank];
        RankCtx { rank, now: state.clock, cfg: &self.cfg, state, net: &mut self.net }
    }

    /// Sends `msg` from `rank` to `dst` through the coalescing layer.
    pub fn am_send<P: RankProgram>(
        &mut self,
        rank: Rank,
        msg: DistanceMessage,
        dst: Rank,
        program: &mut P,
    ) -> Result<(), RuntimeError> {
        if !self.epoch_open {
            return Err(RuntimeError::EpochClosed(rank));
        }
        let mut ctx = self.ctx(rank);
        ctx.send(msg, dst)?;
        ctx.drain_loopback(program)
    }

    /// Submits all partially filled buffers of `rank`.
    pub fn flush_partials(&mut self, rank: Rank) -> Result<usize, RuntimeError> {
        self.ctx(rank).flush_partials()
    }

    /// Moves every envelope delivered by time `until` into its rank's inbox.
    pub fn pump_until(&mut self, until: Time) {
        while self.net.peek_time().is_some_and(|t| t <= until) {
            self.deliver_next();
        }
    }

    fn deliver_next(&mut self) {
        if let Some(env) = self.net.step() {
            let state = &mut self.ranks[env.dst];
            match env.channel {
                Channel::Priority => state.priority_inbox.push_back(env),
                Channel::Normal => state.inbox.push_back(env),
            }
        }
    }

    /// Handles every envelope waiting in `rank`'s inbox, priority channel
    /// first. Returns the number of messages handled.
    pub fn progress<P: RankProgram>(&mut self, rank: Rank, program: &mut P) -> Result<usize, RuntimeError> {
        self.ctx(rank).progress(program)
    }

    /// Global barrier: every rank enters at its local clock and all leave at
    /// the latest entry plus the barrier latency.
    pub fn barrier(&mut self) -> Result<Time, RuntimeError> {
        let entries: Vec<(Rank, Time)> = self.ranks.iter().enumerate().map(|(r, s)| (r, s.clock)).collect();
        let release = self.net.barrier(&entries)?;
        for r in &mut self.ranks {
            r.clock = release;
        }
        Ok(release)
    }

    /// When `rank` next needs the scheduler, or `None` if it is waiting.
    fn wake_time<P: RankProgram>(&self, rank: Rank, program: &P, td: &TerminationDetector) -> Option<Time> {
        let s = &self.ranks[rank];
        if program.local_work(rank) > 0 || !s.buffers_empty() {
            return Some(s.clock);
        }
        if let Some(t) = s.earliest_inbox() {
            return Some(s.clock.max(t));
        }
        if !td.has_contributed(rank) {
            return Some(s.clock.max(td.opened_at()));
        }
        None
    }

    fn rank_action<P: RankProgram>(
        &mut self,
        rank: Rank,
        at: Time,
        program: &mut P,
        td: &mut TerminationDetector,
    ) -> Result<(), RuntimeError> {
        let cfg = &self.cfg;
        let state = &mut self.ranks[rank];
        state.clock = at;

        if program.local_work(rank) > 0 {
            let mut ctx = RankCtx { rank, now: at, cfg, state: &mut *state, net: &mut self.net };
            program.step(rank, &mut ctx)?;
            ctx.drain_loopback(program)?;
            ctx.state.counters.iterations += 1;
            ctx.now += cfg.iteration_cost;

            let iteration = ctx.state.counters.iterations;
            if iteration.is_multiple_of(cfg.ee) || (program.local_work(rank) as u64) < cfg.el {
                ctx.state.counters.loop_progress_calls += 1;
                ctx.progress(program)?;
                ctx.now += cfg.progress_cost;
            }
            if ctx.now >= ctx.state.next_flush {
                ctx.flush_partials()?;
                ctx.state.next_flush = ctx.now + cfg.flush_period;
            }
            ctx.state.clock = ctx.now;
            return Ok(());
        }

        // End-of-epoch draining.
        let mut ctx = RankCtx { rank, now: at, cfg, state: &mut *state, net: &mut self.net };
        if !ctx.state.buffers_empty() {
            ctx.flush_partials()?;
        }
        if !ctx.state.inbox_empty() {
            ctx.progress(program)?;
            ctx.now += cfg.progress_cost;
        }
        ctx.state.clock = ctx.now;
        if program.local_work(rank) == 0 && state.buffers_empty() && state.inbox_empty() && !td.has_contributed(rank) {
            td.contribute(
                rank,
                Contribution {
                    sent: state.epoch_sent,
                    received: state.epoch_received,
                    has_work: false,
                    at: state.clock,
                },
            );
        }
        Ok(())
    }

    /// Runs one epoch of `program` on all ranks until quiescence.
    pub fn run_epoch<P: RankProgram>(&mut self, program: &mut P) -> Result<EpochReport, RuntimeError> {
        self.open_epoch();
        let start = self.now();
        let deadline = start.saturating_add(self.cfg.horizon);
        let mut td = TerminationDetector::new(self.cfg.num_ranks, self.cfg.net.barrier_latency, start);

        let end = loop {
            let t_net = self.net.peek_time();
            let next_rank =
                (0..self.cfg.num_ranks).filter_map(|r| self.wake_time(r, program, &td).map(|t| (t, r))).min();
            let t_round = td.ready_at();

            let Some(t) = [t_net, next_rank.map(|(t, _)| t), t_round].into_iter().flatten().min() else {
                self.net.check_idle()?;
                return Err(RuntimeError::Stalled(self.now()));
            };
            if t > deadline {
                return Err(self.livelock(t, &td, program));
            }

            if t_net == Some(t) {
                self.deliver_next();
            } else if let Some((_, r)) = next_rank.filter(|&(tr, _)| tr == t) {
                self.rank_action(r, t, program, &mut td)?;
            } else if let RoundOutcome::Terminated { at } = td.conclude() {
                break at;
            }
        };

        self.rounds += td.rounds();
        self.epochs += 1;
        self.net.advance_to(end);
        for r in &mut self.ranks {
            r.clock = end;
        }
        self.close_epoch();
        self.check_quiescent(program)?;

        let sent = self.ranks.iter().map(|r| r.epoch_sent).sum();
        let received = self.ranks.iter().map(|r| r.epoch_received).sum();
        Ok(EpochReport { start, end, rounds: td.rounds(), messages_sent: sent, messages_received: received })
    }

    fn livelock<P: RankProgram>(&self, time: Time, td: &TerminationDetector, program: &P) -> RuntimeError {
        RuntimeError::Livelock {
            time,
            rounds: td.rounds(),
            sent: self.ranks.iter().map(|r| r.epoch_sent).sum(),
            received: self.ranks.iter().map(|r| r.epoch_received).sum(),
            in_flight: self.net.in_flight(),
            local_work: (0..self.cfg.num_ranks).map(|r| program.local_work(r)).sum(),
        }
    }

    fn check_quiescent<P: RankProgram>(&self, program: &P) -> Result<(), RuntimeError> {
        let sent: u64 = self.ranks.iter().map(|r| r.epoch_sent).sum();
        let received: u64 = self.ranks.iter().map(|r| r.epoch_received).sum();
        if sent != received {
            return Err(RuntimeError::Invariant(format!("sent {sent} != received {received}")));
        }
        if self.net.in_flight() > 0 {
            return Err(RuntimeError::Invariant(format!("{} envelopes in flight", self.net.in_flight())));
        }
        for (r, s) in self.ranks.iter().enumerate() {
            if !s.buffers_empty() || !s.inbox_empty() || !s.loopback.is_empty() || program.local_work(r) > 0 {
                return Err(RuntimeError::Invariant(format!("rank {r} not drained")));
            }
        }
        Ok(())
    }
}
