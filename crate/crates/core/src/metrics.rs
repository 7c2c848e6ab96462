// SPDX-License-Identifier: Apache-2.0
//! Work accounting and throughput.
//!
//! Four task categories are tracked. *Rejected*: a delivered distance that
//! does not improve the recorded one. *Invalidated*: a queued task whose
//! distance went stale before it was popped. *Useful* and *useless* split the
//! processed tasks after the run: useful tasks carried the final distance,
//! useless ones were later superseded.
//!
//! Every delivered message therefore ends up as exactly one of rejected,
//! invalidated or processed, so
//! `useful + useless + rejected + invalidated = deliveries + seeds`.

use num_rational::Ratio;
use serde::Serialize;

use crate::graph::LocalGraph;
use crate::runtime::RuntimeCounters;
use crate::{Distance, Time, VertexId, INFINITY};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("vertex {vertex} processed at distance {distance}, below its final distance {final_distance}")]
    ImpossibleTask { vertex: VertexId, distance: Distance, final_distance: Distance },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WorkStats {
    pub useful: u64,
    pub useless: u64,
    pub rejected: u64,
    pub invalidated: u64,
    /// Every processed `(vertex, distance)` task, in per-rank order.
    pub processed_log: Vec<(VertexId, Distance)>,
    /// Initial tasks injected by the driver (the source).
    pub seeds: u64,
    /// Messages handed to the handler, self-sends included.
    pub deliveries: u64,
    pub full_buffers_sent: u64,
    pub partial_buffers_sent: u64,
    pub partial_messages_sent: u64,
    pub priority_buffers_sent: u64,
    pub priority_messages_sent: u64,
    pub messages_sent: u64,
    pub messages_received: u64,
    pub local_deliveries: u64,
    pub cache_drops: u64,
    pub progress_calls: u64,
    pub completion_time: Time,
    pub reachable_edges: u64,
    pub teps: Ratio<u64>,
    pub buckets_processed: u64,
    pub epochs: u64,
    pub termination_rounds: u64,
}

impl WorkStats {
    pub fn processed(&self) -> u64 {
        self.processed_log.len() as u64
    }

    pub(crate) fn absorb_runtime(&mut self, c: &RuntimeCounters) {
        self.full_buffers_sent = c.full_buffers;
        self.partial_buffers_sent = c.partial_buffers;
        self.partial_messages_sent = c.partial_messages;
        self.priority_buffers_sent = c.priority_buffers;
        self.priority_messages_sent = c.priority_messages;
        self.messages_sent = c.messages_sent;
        self.messages_received = c.messages_received;
        self.local_deliveries = c.local_deliveries;
        self.cache_drops = c.cache_drops;
        self.progress_calls = c.progress_calls;
        self.deliveries = c.messages_received + c.local_deliveries;
    }

    /// Checks the counter identities that must hold after every run.
    pub fn check_conservation(&self, coalescing_size: usize) -> Result<(), String> {
        if self.messages_sent != self.messages_received {
            return Err(format!("sent {} != received {}", self.messages_sent, self.messages_received));
        }
        let buffered =
            self.full_buffers_sent * coalescing_size as u64 + self.partial_messages_sent + self.priority_messages_sent;
        if buffered != self.messages_sent {
            return Err(format!("buffer accounting {buffered} != messages sent {}", self.messages_sent));
        }
        if self.useful + self.useless != self.processed() {
            return Err(format!("useful {} + useless {} != processed {}", self.useful, self.useless, self.processed()));
        }
        let outcomes = self.processed() + self.rejected + self.invalidated;
        if outcomes != self.deliveries + self.seeds {
            return Err(format!("task outcomes {outcomes} != deliveries {} + seeds {}", self.deliveries, self.seeds));
        }
        Ok(())
    }

    /// `(useful, useless, rejected, invalidated)`.
    pub fn work_tuple(&self) -> (u64, u64, u64, u64) {
        (self.useful, self.useless, self.rejected, self.invalidated)
    }
}

/// Splits processed tasks into useful (`d == final`) and useless (`d > final`).
pub fn classify_work(
    processed_log: &[(VertexId, Distance)],
    final_distances: &[Distance],
) -> Result<(u64, u64), MetricsError> {
    let (mut useful, mut useless) = (0, 0);
    for &(vertex, distance) in processed_log {
        let final_distance = final_distances[vertex as usize];
        match distance.cmp(&final_distance) {
            std::cmp::Ordering::Equal => useful += 1,
            std::cmp::Ordering::Greater => useless += 1,
            std::cmp::Ordering::Less => return Err(MetricsError::ImpossibleTask { vertex, distance, final_distance }),
        }
    }
    Ok((useful, useless))
}

/// Traversed edges per unit of virtual time. Zero when no time elapsed.
pub fn teps(edge_count_reachable: u64, completion_time: Time) -> Ratio<u64> {
    if completion_time == 0 {
        return Ratio::from_integer(0);
    }
    Ratio::new(edge_count_reachable, completion_time)
}

/// Out-edges of every vertex with a finite distance.
pub fn reachable_edges(graphs: &[LocalGraph], distances: &[Distance]) -> u64 {
    graphs
        .iter()
        .flat_map(|g| (g.lo..g.hi).filter(|&v| distances[v as usize] != INFINITY).map(|v| g.out_degree(v) as u64))
        .sum()
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// One output record. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub scale: u32,
    pub edgefactor: u32,
    pub max_weight: u32,
    pub num_ranks: usize,
    pub algorithm: String,
    pub delta: u32,
    pub coalescing_size: usize,
    pub ee: u64,
    pub el: String,
    pub flush_period: u64,
    pub cache_capacity: usize,
    pub priority_messages: bool,
    pub seed: u64,
    pub source: VertexId,
    pub completion_time: Time,
    pub teps: String,
    pub useful: u64,
    pub useless: u64,
    pub rejected: u64,
    pub invalidated: u64,
    pub messages_sent: u64,
    pub messages_received: u64,
    pub full_buffers: u64,
    pub partial_buffers: u64,
}

pub const CSV_COLUMNS: [&str; 24] = [
    "scale",
    "edgefactor",
    "max_weight",
    "num_ranks",
    "algorithm",
    "delta",
    "coalescing_size",
    "ee",
    "el",
    "flush_period",
    "cache_capacity",
    "priority_messages",
    "seed",
    "source",
    "completion_time",
    "teps",
    "useful",
    "useless",
    "rejected",
    "invalidated",
    "messages_sent",
    "messages_received",
    "full_buffers",
    "partial_buffers",
];

/// Renders rows as CSV with the header line, even when `rows` is empty.
pub fn write_csv<W: std::io::Write>(out: W, rows: &[CsvRow]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
