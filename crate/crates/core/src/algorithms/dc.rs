// SPDX-License-Identifier: Apache-2.0
use super::{check_inputs, finish, AlgoError, LocalWorkQueue, RankSsp};
use crate::graph::LocalGraph;
use crate::metrics::WorkStats;
use crate::runtime::{Channel, DistanceMessage, RankCtx, RankProgram, Runtime, RuntimeConfig, RuntimeError};
use crate::{Distance, Rank, VertexId};

struct DcRank<'g> {
    ssp: RankSsp<'g>,
    queue: LocalWorkQueue,
}

/// Distributed control: one private ordered queue per rank, an unordered
/// global bag of messages in between, no barriers.
struct DcProgram<'g> {
    ranks: Vec<DcRank<'g>>,
    delta: Distance,
}

impl DcProgram<'_> {
    /// Records `(v, d)` as processed and relaxes all of `v`'s out-edges.
    /// Light edges (`w < delta`) go on the priority channel, which falls back
    /// to the normal one when priority messaging is off.
    fn relax(&mut self, rank: Rank, v: VertexId, d: Distance, ctx: &mut RankCtx<'_>) -> Result<(), RuntimeError> {
        let r = &mut self.ranks[rank].ssp;
        r.processed.push((v, d));
        let g = r.graph;
        for (u, w) in g.neighbors(v) {
            let msg = DistanceMessage::new(u, d.saturating_add(w));
            if w < self.delta {
                ctx.send_priority(msg, g.owner_of(u))?;
            } else {
                ctx.send(msg, g.owner_of(u))?;
            }
        }
        Ok(())
    }
}

impl RankProgram for DcProgram<'_> {
    fn local_work(&self, rank: Rank) -> usize {
        self.ranks[rank].queue.len()
    }

    fn step(&mut self, rank: Rank, ctx: &mut RankCtx<'_>) -> Result<(), RuntimeError> {
        let r = &mut self.ranks[rank];
        let Some((d, v)) = r.queue.pop() else { return Ok(()) };
        if d > r.ssp.tentative(v) {
            r.ssp.invalidated += 1;
            return Ok(());
        }
        self.relax(rank, v, d, ctx)
    }

    fn handle(
        &mut self,
        rank: Rank,
        msg: DistanceMessage,
        channel: Channel,
        ctx: &mut RankCtx<'_>,
    ) -> Result<(), RuntimeError> {
        let r = &mut self.ranks[rank];
        if !r.ssp.improve(msg.vertex, msg.distance) {
            return Ok(());
        }
        match channel {
            // Priority tasks bypass the queue and are processed on arrival.
            Channel::Priority => self.relax(rank, msg.vertex, msg.distance, ctx),
            Channel::Normal => {
                r.queue.push(msg.distance, msg.vertex);
                Ok(())
            }
        }
    }
}

/// Distributed-control SSSP. Unreachable vertices report [`crate::INFINITY`].
pub fn dc_sssp(
    graphs: &[LocalGraph],
    source: VertexId,
    cfg: &RuntimeConfig,
) -> Result<(Vec<Distance>, WorkStats), AlgoError> {
    check_inputs(graphs, source, cfg)?;
    let mut rt = Runtime::new(cfg.clone())?;
    let mut program = DcProgram {
        ranks: graphs.iter().map(|g| DcRank { ssp: RankSsp::new(g), queue: LocalWorkQueue::new() }).collect(),
        delta: cfg.delta,
    };

    let home = graphs[0].owner_of(source);
    let seed = &mut program.ranks[home];
    seed.ssp.improve(source, 0);
    seed.queue.push(0, source);

    rt.run_epoch(&mut program)?;
    let ranks = program.ranks.into_iter().map(|r| r.ssp).collect();
    finish(&rt, graphs, ranks, 0)
}
