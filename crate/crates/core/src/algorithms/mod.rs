// SPDX-License-Identifier: Apache-2.0
//! Shortest-path algorithms over the active-message runtime.
//!
//! [`dc_sssp`] is the distributed-control algorithm: every rank pops its own
//! best task and relaxes it without global synchronization. [`delta_stepping`]
//! processes distance buckets in globally agreed order, one pair of epochs
//! (light edges to fixpoint, then heavy edges) per bucket. Both return exact
//! distances; [`dijkstra_reference`] is the sequential oracle.

mod dc;
mod delta;
mod dijkstra;
mod queue;

use std::fmt;
use std::str::FromStr;

pub use dc::dc_sssp;
pub use delta::delta_stepping;
pub use dijkstra::dijkstra_reference;
pub use queue::{bucket_index, BucketStore, LocalWorkQueue};

use crate::graph::LocalGraph;
use crate::metrics::{self, MetricsError, WorkStats};
use crate::runtime::{Runtime, RuntimeConfig, RuntimeError};
use crate::{Distance, VertexId, INFINITY};

#[derive(Debug, thiserror::Error)]
pub enum AlgoError {
    #[error("source {vertex} out of range 0..{n}")]
    SourceOutOfRange { vertex: VertexId, n: u64 },
    #[error("{graphs} graph fragments for {ranks} ranks")]
    RankMismatch { graphs: usize, ranks: usize },
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    DcSssp,
    DcBfs,
    DeltaStepping,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::DcSssp, Algorithm::DcBfs, Algorithm::DeltaStepping];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::DcSssp => "dc-sssp",
            Algorithm::DcBfs => "dc-bfs",
            Algorithm::DeltaStepping => "delta-stepping",
        }
    }

    pub fn run(
        self,
        graphs: &[LocalGraph],
        source: VertexId,
        cfg: &RuntimeConfig,
    ) -> Result<(Vec<Distance>, WorkStats), AlgoError> {
        match self {
            Algorithm::DcSssp => dc_sssp(graphs, source, cfg),
            Algorithm::DcBfs => dc_bfs(graphs, source, cfg),
            Algorithm::DeltaStepping => delta_stepping(graphs, source, cfg),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?} (expected dc-sssp, dc-bfs or delta-stepping)"))
    }
}

/// DC-SSSP on the same topology with every weight set to 1.
pub fn dc_bfs(
    graphs: &[LocalGraph],
    source: VertexId,
    cfg: &RuntimeConfig,
) -> Result<(Vec<Distance>, WorkStats), AlgoError> {
    let unit: Vec<LocalGraph> =
        graphs.iter().map(|g| LocalGraph { weights: vec![1; g.weights.len()], ..g.clone() }).collect();
    dc_sssp(&unit, source, cfg)
}

/// Exact element-wise comparison, infinities included.
pub fn validate(distances: &[Distance], oracle: &[Distance]) -> bool {
    distances == oracle
}

fn check_inputs(graphs: &[LocalGraph], source: VertexId, cfg: &RuntimeConfig) -> Result<(), AlgoError> {
    if graphs.len() != cfg.num_ranks {
        return Err(AlgoError::RankMismatch { graphs: graphs.len(), ranks: cfg.num_ranks });
    }
    let n = graphs.first().map_or(0, |g| g.n);
    if source >= n {
        return Err(AlgoError::SourceOutOfRange { vertex: source, n });
    }
    Ok(())
}

/// Tentative distances and task bookkeeping of one rank.
#[derive(Debug)]
struct RankSsp<'g> {
    graph: &'g LocalGraph,
    tentative: Vec<Distance>,
    processed: Vec<(VertexId, Distance)>,
    rejected: u64,
    invalidated: u64,
}

impl<'g> RankSsp<'g> {
    fn new(graph: &'g LocalGraph) -> Self {
        Self {
            graph,
            tentative: vec![INFINITY; graph.num_local_vertices()],
            processed: Vec::new(),
            rejected: 0,
            invalidated: 0,
        }
    }

    #[inline]
    fn tentative(&self, v: VertexId) -> Distance {
        self.tentative[self.graph.local_index(v)]
    }

    /// Lowers the tentative distance if `d` improves it; otherwise counts a
    /// rejected delivery.
    #[inline]
    fn improve(&mut self, v: VertexId, d: Distance) -> bool {
        let slot = &mut self.tentative[self.graph.local_index(v)];
        if d < *slot {
            *slot = d;
            true
        } else {
            self.rejected += 1;
            false
        }
    }
}

/// Gathers distances and statistics once the last epoch has closed.
fn finish(
    rt: &Runtime,
    graphs: &[LocalGraph],
    ranks: Vec<RankSsp<'_>>,
    buckets_processed: u64,
) -> Result<(Vec<Distance>, WorkStats), AlgoError> {
    let n = graphs[0].n as usize;
    let mut distances = vec![INFINITY; n];
    let mut stats = WorkStats { seeds: 1, buckets_processed, ..Default::default() };
    for r in ranks {
        let lo = r.graph.lo as usize;
        distances[lo..lo + r.tentative.len()].copy_from_slice(&r.tentative);
        stats.rejected += r.rejected;
        stats.invalidated += r.invalidated;
        stats.processed_log.extend(r.processed);
    }
    stats.absorb_runtime(&rt.total_counters());
    let (useful, useless) = metrics::classify_work(&stats.processed_log, &distances)?;
    stats.useful = useful;
    stats.useless = useless;
    stats.completion_time = rt.now();
    stats.reachable_edges = metrics::reachable_edges(graphs, &distances);
    stats.teps = metrics::teps(stats.reachable_edges, stats.completion_time);
    stats.epochs = rt.epochs();
    stats.termination_rounds = rt.termination_rounds();
    Ok((distances, stats))
}
