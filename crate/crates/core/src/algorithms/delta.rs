// SPDX-License-Identifier: Apache-2.0
use super::{check_inputs, finish, AlgoError, BucketStore, RankSsp};
use crate::graph::LocalGraph;
use crate::metrics::WorkStats;
use crate::runtime::{Channel, DistanceMessage, RankCtx, RankProgram, Runtime, RuntimeConfig, RuntimeError};
use crate::{Distance, Rank, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Pop entries of the current bucket and relax their light edges.
    Light,
    /// Relax the heavy edges of every vertex settled in the current bucket.
    Heavy,
}

struct DeltaRank<'g> {
    ssp: RankSsp<'g>,
    buckets: BucketStore,
    settled: Vec<VertexId>,
    settled_mark: Vec<bool>,
}

struct DeltaProgram<'g> {
    ranks: Vec<DeltaRank<'g>>,
    delta: Distance,
    phase: Phase,
    current: usize,
}

impl RankProgram for DeltaProgram<'_> {
    fn local_work(&self, rank: Rank) -> usize {
        let r = &self.ranks[rank];
        match self.phase {
            Phase::Light => r.buckets.len_of(self.current),
            Phase::Heavy => r.settled.len(),
        }
    }

    fn step(&mut self, rank: Rank, ctx: &mut RankCtx<'_>) -> Result<(), RuntimeError> {
        let delta = self.delta;
        let r = &mut self.ranks[rank];
        let g = r.ssp.graph;
        match self.phase {
            Phase::Light => {
                let Some((v, d)) = r.buckets.pop(self.current) else { return Ok(()) };
                if d > r.ssp.tentative(v) {
                    r.ssp.invalidated += 1;
                    return Ok(());
                }
                r.ssp.processed.push((v, d));
                let i = g.local_index(v);
                if !r.settled_mark[i] {
                    r.settled_mark[i] = true;
                    r.settled.push(v);
                }
                for (u, w) in g.neighbors(v).filter(|&(_, w)| w < delta) {
                    ctx.send(DistanceMessage::new(u, d.saturating_add(w)), g.owner_of(u))?;
                }
            }
            Phase::Heavy => {
                let Some(v) = r.settled.pop() else { return Ok(()) };
                r.settled_mark[g.local_index(v)] = false;
                let d = r.ssp.tentative(v);
                for (u, w) in g.neighbors(v).filter(|&(_, w)| w >= delta) {
                    ctx.send(DistanceMessage::new(u, d.saturating_add(w)), g.owner_of(u))?;
                }
            }
        }
        Ok(())
    }

    fn handle(
        &mut self,
        rank: Rank,
        msg: DistanceMessage,
        _channel: Channel,
        _ctx: &mut RankCtx<'_>,
    ) -> Result<(), RuntimeError> {
        let r = &mut self.ranks[rank];
        if r.ssp.improve(msg.vertex, msg.distance) {
            r.buckets.insert(msg.vertex, msg.distance);
        }
        Ok(())
    }
}

/// Delta-stepping SSSP. Each bucket costs a reduction and a barrier to agree
/// on the lowest live bucket, one epoch relaxing light edges to a fixpoint
/// and one epoch relaxing heavy edges.
pub fn delta_stepping(
    graphs: &[LocalGraph],
    source: VertexId,
    cfg: &RuntimeConfig,
) -> Result<(Vec<Distance>, WorkStats), AlgoError> {
    check_inputs(graphs, source, cfg)?;
    let mut rt = Runtime::new(cfg.clone())?;
    let mut program = DeltaProgram {
        ranks: graphs
            .iter()
            .map(|g| DeltaRank {
                ssp: RankSsp::new(g),
                buckets: BucketStore::new(cfg.delta),
                settled: Vec::new(),
                settled_mark: vec![false; g.num_local_vertices()],
            })
            .collect(),
        delta: cfg.delta,
        phase: Phase::Light,
        current: 0,
    };

    let home = graphs[0].owner_of(source);
    let seed = &mut program.ranks[home];
    seed.ssp.improve(source, 0);
    seed.buckets.insert(source, 0);

    let mut buckets_processed = 0;
    loop {
        // Allreduce of each rank's lowest live bucket, then a barrier.
        rt.barrier()?;
        let current = program.current;
        let mut next = None;
        for r in &mut program.ranks {
            let ssp = &r.ssp;
            let (first, stale) = r.buckets.first_live(current, |v, d| ssp.tentative(v) == d);
            r.ssp.invalidated += stale;
            next = match (next, first) {
                (Some(a), Some(b)) => Some(usize::min(a, b)),
                (a, b) => a.or(b),
            };
        }
        rt.barrier()?;
        let Some(bucket) = next else { break };

        program.current = bucket;
        program.phase = Phase::Light;
        rt.run_epoch(&mut program)?;
        program.phase = Phase::Heavy;
        rt.run_epoch(&mut program)?;
        buckets_processed += 1;
    }

    let ranks = program.ranks.into_iter().map(|r| r.ssp).collect();
    finish(&rt, graphs, ranks, buckets_processed)
}
