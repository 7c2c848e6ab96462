// SPDX-License-Identifier: Apache-2.0
//! Experiment driver: builds the graph, picks sources, runs an algorithm per
//! source and repetition, validates distances and emits CSV rows. Sweeps take
//! the Cartesian product of their axes and run the cells in parallel; the
//! output order is the deterministic axis order regardless of scheduling.

mod config;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{format_el, parse_config, ConfigError, ExperimentConfig, GraphSpec, SweepAxis, KEYS, SEED_ENV};

use crate::algorithms::{dijkstra_reference, validate, AlgoError, Algorithm};
use crate::graph::{generate_kronecker, load_edge_list, partition_1d, EdgeList, GraphError};
use crate::metrics::{ratio_to_f64, CsvRow, WorkStats};
use crate::{Distance, VertexId};

/// Largest vertex count validated without an explicit `validate=true`.
pub const AUTO_VALIDATE_MAX_VERTICES: u64 = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Algorithm(#[from] AlgoError),
    #[error("{algorithm} from source {source_vertex}: {mismatches} distances differ from the oracle")]
    ValidationFailed { algorithm: Algorithm, source_vertex: VertexId, mismatches: usize },
    #[error("{algorithm} from source {source_vertex}: counter conservation violated: {msg}")]
    Conservation { algorithm: Algorithm, source_vertex: VertexId, msg: String },
}

/// A graph together with the sources drawn from it.
#[derive(Debug, Clone)]
pub struct Workload {
    pub edges: EdgeList,
    pub sources: Vec<VertexId>,
    pub scale: u32,
    pub edgefactor: u32,
    pub max_weight: u32,
}

/// One run of one algorithm from one source.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub row: CsvRow,
    pub stats: WorkStats,
    pub distances: Vec<Distance>,
    /// `None` when validation was skipped.
    pub validated: Option<bool>,
}

/// Generates or loads the graph described by `cfg`, symmetrized when
/// `graph.undirected` is set.
pub fn build_graph(cfg: &ExperimentConfig) -> Result<EdgeList, GraphError> {
    let g = &cfg.graph;
    let edges = match &g.input {
        Some(path) => load_edge_list(path)?,
        None => generate_kronecker(g.scale, g.edgefactor, g.max_weight, cfg.runtime.seed)?,
    };
    Ok(if g.undirected { edges.symmetrize() } else { edges })
}

/// Draws up to `count` distinct vertices with at least one out-edge. Falls
/// back to vertex 0 on an edgeless graph.
pub fn select_sources(edges: &EdgeList, count: usize, seed: u64) -> Vec<VertexId> {
    let candidates: Vec<VertexId> =
        edges.out_degrees().iter().enumerate().filter(|(_, &d)| d > 0).map(|(v, _)| v as VertexId).collect();
    if candidates.is_empty() {
        return vec![0];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let k = count.min(candidates.len());
    rand::seq::index::sample(&mut rng, candidates.len(), k).into_iter().map(|i| candidates[i]).collect()
}

pub fn build_workload(cfg: &ExperimentConfig) -> Result<Workload, GraphError> {
    let edges = build_graph(cfg)?;
    let sources = select_sources(&edges, cfg.sources, cfg.runtime.seed);
    let (scale, edgefactor, max_weight) = match cfg.graph.input {
        None => (cfg.graph.scale, cfg.graph.edgefactor, cfg.graph.max_weight),
        Some(_) => {
            let n = edges.n.max(1);
            (n.trailing_zeros(), (edges.len() as u64 / n) as u32, edges.max_weight())
        }
    };
    Ok(Workload { edges, sources, scale, edgefactor, max_weight })
}

fn should_validate(cfg: &ExperimentConfig, n: u64) -> bool {
    cfg.validate.unwrap_or(n <= AUTO_VALIDATE_MAX_VERTICES)
}

fn oracle(algorithm: Algorithm, edges: &EdgeList, source: VertexId) -> Vec<Distance> {
    match algorithm {
        Algorithm::DcBfs => dijkstra_reference(&edges.with_unit_weights(), source),
        _ => dijkstra_reference(edges, source),
    }
}

fn make_row(cfg: &ExperimentConfig, w: &Workload, algorithm: Algorithm, source: VertexId, s: &WorkStats) -> CsvRow {
    let rt = &cfg.runtime;
    CsvRow {
        scale: w.scale,
        edgefactor: w.edgefactor,
        max_weight: w.max_weight,
        num_ranks: rt.num_ranks,
        algorithm: algorithm.to_string(),
        delta: rt.delta,
        coalescing_size: rt.coalescing_size,
        ee: rt.ee,
        el: format_el(rt.el),
        flush_period: rt.flush_period,
        cache_capacity: rt.cache_capacity,
        priority_messages: rt.priority_messages,
        seed: rt.seed,
        source,
        completion_time: s.completion_time,
        teps: format!("{:.6}", ratio_to_f64(s.teps)),
        useful: s.useful,
        useless: s.useless,
        rejected: s.rejected,
        invalidated: s.invalidated,
        messages_sent: s.messages_sent,
        messages_received: s.messages_received,
        full_buffers: s.full_buffers_sent,
        partial_buffers: s.partial_buffers_sent,
    }
}

/// Runs `algorithm` from every source of the workload, `cfg.repetitions`
/// times each. Validation outcomes are recorded per run; a conservation
/// violation is an error.
pub fn run_records(
    cfg: &ExperimentConfig,
    w: &Workload,
    algorithm: Algorithm,
    force_validate: bool,
) -> Result<Vec<RunRecord>, ExperimentError> {
    cfg.validate()?;
    let graphs = partition_1d(&w.edges, cfg.runtime.num_ranks)?;
    let check = force_validate || should_validate(cfg, w.edges.n);
    let mut out = Vec::with_capacity(w.sources.len() * cfg.repetitions);
    for &source in &w.sources {
        let expected = check.then(|| oracle(algorithm, &w.edges, source));
        for _ in 0..cfg.repetitions {
            let (distances, stats) = algorithm.run(&graphs, source, &cfg.runtime)?;
            stats.check_conservation(cfg.runtime.coalescing_size).map_err(|msg| ExperimentError::Conservation {
                algorithm,
                source_vertex: source,
                msg,
            })?;
            let validated = expected.as_ref().map(|o| validate(&distances, o));
            out.push(RunRecord { row: make_row(cfg, w, algorithm, source, &stats), stats, distances, validated });
        }
    }
    Ok(out)
}

fn rows_checked(records: Vec<RunRecord>, algorithm: Algorithm, w: &Workload) -> Result<Vec<CsvRow>, ExperimentError> {
    records
        .into_iter()
        .map(|r| match r.validated {
            Some(false) => {
                let o = oracle(algorithm, &w.edges, r.row.source);
                let mismatches = r.distances.iter().zip(&o).filter(|(a, b)| a != b).count();
                Err(ExperimentError::ValidationFailed { algorithm, source_vertex: r.row.source, mismatches })
            }
            _ => Ok(r.row),
        })
        .collect()
}

fn run_on(cfg: &ExperimentConfig, w: &Workload) -> Result<Vec<CsvRow>, ExperimentError> {
    let records = run_records(cfg, w, cfg.algorithm, false)?;
    rows_checked(records, cfg.algorithm, w)
}

/// Runs the configured algorithm. Sweep axes are ignored.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<CsvRow>, ExperimentError> {
    cfg.validate()?;
    let w = build_workload(cfg)?;
    run_on(cfg, &w)
}

/// Expands the sweep axes into one configuration per cell. The first axis
/// varies slowest.
pub fn sweep_cells(cfg: &ExperimentConfig) -> Result<Vec<ExperimentConfig>, ExperimentError> {
    let mut base = cfg.clone();
    base.sweep.clear();
    let mut cells = vec![base];
    for axis in &cfg.sweep {
        let mut next = Vec::with_capacity(cells.len() * axis.values.len());
        for cell in &cells {
            for v in &axis.values {
                let mut c = cell.clone();
                c.set(&axis.key, v)?;
                next.push(c);
            }
        }
        cells = next;
    }
    for c in &cells {
        c.validate()?;
    }
    Ok(cells)
}

type WorkloadKey = (GraphSpec, u64, usize);

fn workload_key(c: &ExperimentConfig) -> WorkloadKey {
    (c.graph.clone(), c.runtime.seed, c.sources)
}

/// Runs every sweep cell. Cells sharing graph parameters, seed and source
/// count share one workload.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<CsvRow>, ExperimentError> {
    let cells = sweep_cells(cfg)?;
    let mut workloads: HashMap<WorkloadKey, Workload> = HashMap::new();
    for c in &cells {
        let key = workload_key(c);
        if let std::collections::hash_map::Entry::Vacant(slot) = workloads.entry(key) {
            slot.insert(build_workload(c)?);
        }
    }
    let per_cell: Vec<Result<Vec<CsvRow>, ExperimentError>> =
        cells.par_iter().map(|c| run_on(c, &workloads[&workload_key(c)])).collect();
    let mut rows = Vec::new();
    for r in per_cell {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Outcome of checking one algorithm from one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationEntry {
    pub algorithm: Algorithm,
    pub source: VertexId,
    pub passed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(|e| e.passed)
    }
}

/// Runs all three algorithms from every source and compares each result
/// with the sequential oracle, whatever the graph size.
pub fn validate_cmd(cfg: &ExperimentConfig) -> Result<ValidationReport, ExperimentError> {
    cfg.validate()?;
    let w = build_workload(cfg)?;
    let single = ExperimentConfig { repetitions: 1, ..cfg.clone() };
    let mut report = ValidationReport::default();
    for algorithm in Algorithm::ALL {
        for r in run_records(&single, &w, algorithm, true)? {
            report.entries.push(ValidationEntry { algorithm, source: r.row.source, passed: r.validated == Some(true) });
        }
    }
    Ok(report)
}
