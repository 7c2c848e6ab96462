// SPDX-License-Identifier: Apache-2.0
//! A desk-scale laboratory for distributed graph algorithms.
//!
//! Distributed-control (DC) SSSP/BFS and delta-stepping run on top of a
//! configurable active-message runtime ([`runtime`]), which in turn talks to
//! a deterministic discrete-event transport ([`simnet`]). Every run reports
//! the work categories of [`metrics::WorkStats`] together with the virtual
//! completion time, so the effect of coalescing, progress frequency, caching
//! and buffering can be measured without a cluster.

pub mod algorithms;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod runtime;
pub mod simnet;

/// Global vertex identifier. Eight bytes on the wire.
pub type VertexId = u64;

/// Shortest-path distance. Four bytes on the wire.
pub type Distance = u32;

/// Index of a simulated rank.
pub type Rank = usize;

/// Virtual time in abstract units.
pub type Time = u64;

/// Sentinel for unreachable vertices.
pub const INFINITY: Distance = Distance::MAX;

pub use algorithms::{dc_bfs, dc_sssp, delta_stepping, dijkstra_reference, validate, Algorithm};
pub use graph::{generate_kronecker, load_edge_list, owner, partition_1d, Edge, EdgeList, LocalGraph};

pub use metrics::WorkStats;
pub use runtime::{DistanceMessage, RuntimeConfig};
pub use simnet::{NetConfig, SimNet};
