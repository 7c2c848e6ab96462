// SPDX-License-Identifier: Apache-2.0
//! Flat `key = value` experiment configuration.
//!
//! Sources are applied in order: built-in defaults, the config file, the
//! `DGALAB_SEED` environment variable, then command-line overrides. Lines of
//! the form `sweep.<key> = v1,v2,...` declare sweep axes.

use std::path::{Path, PathBuf};

use crate::algorithms::Algorithm;
use crate::runtime::{RuntimeConfig, EL_UNBOUNDED};

pub const SEED_ENV: &str = "DGALAB_SEED";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown key {key:?}; valid keys: {}", KEYS.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", "))]
    UnknownKey { key: String },
    #[error("invalid value {value:?} for {key}: {msg}")]
    BadValue { key: String, value: String, msg: String },
    #[error("{origin}: line {line}: expected key=value")]
    Syntax { origin: String, line: usize },
    #[error("sweep axis {0} has no values")]
    EmptyAxis(String),
    #[error("{0}")]
    Invalid(String),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Every scalar key with a short description.
pub const KEYS: &[(&str, &str)] = &[
    ("graph.scale", "log2 of the vertex count of the generated graph"),
    ("graph.edgefactor", "edge samples per vertex"),
    ("graph.max_weight", "edge weights are uniform on [1, max_weight]"),
    ("graph.undirected", "add the reverse of every generated edge"),
    ("graph.input", "load an edge-list file instead of generating"),
    ("algorithm", "dc-sssp | dc-bfs | delta-stepping"),
    ("num_ranks", "simulated ranks"),
    ("seed", "generator and source-selection seed"),
    ("sources", "number of random source vertices"),
    ("repetitions", "rows per source"),
    ("validate", "check distances against the oracle (always on up to scale 16)"),
    ("rt.coalescing_size", "messages per coalescing buffer"),
    ("rt.flush_period", "virtual time between partial-buffer flushes"),
    ("rt.ee", "loop iterations between progress calls"),
    ("rt.el", "queue size below which progress runs every iteration (inf allowed)"),
    ("rt.cache_capacity", "reduction cache slots, 0 disables"),
    ("rt.priority_messages", "send light-edge relaxations on the priority channel"),
    ("rt.self_send_check", "handle self-addressed messages without the transport"),
    ("rt.delta", "bucket width"),
    ("rt.iteration_cost", "virtual time per loop iteration"),
    ("rt.progress_cost", "virtual time per progress call"),
    ("rt.horizon", "livelock guard: maximum virtual time per epoch"),
    ("net.base_latency", "fixed delivery latency"),
    ("net.byte_cost", "time per payload byte"),
    ("net.send_overhead", "fixed per-injection time"),
    ("net.eager_threshold_bytes", "largest eager payload"),
    ("net.rendezvous_rtt", "extra time above the eager threshold"),
    ("net.chunk_penalty", "extra time per additional threshold-sized chunk"),
    ("net.barrier_latency", "cost of a barrier or reduction round"),
];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphSpec {
    pub scale: u32,
    pub edgefactor: u32,
    pub max_weight: u32,
    pub undirected: bool,
    pub input: Option<PathBuf>,
}

impl Default for GraphSpec {
    fn default() -> Self {
        Self { scale: 10, edgefactor: 16, max_weight: 100, undirected: true, input: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub runtime: RuntimeConfig,
    pub algorithm: Algorithm,
    pub sources: usize,
    pub repetitions: usize,
    /// `None`: validate when the graph has at most 2^16 vertices.
    pub validate: Option<bool>,
    pub sweep: Vec<SweepAxis>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphSpec::default(),
            runtime: RuntimeConfig::default(),
            algorithm: Algorithm::DcSssp,
            sources: 1,
            repetitions: 1,
            validate: None,
            sweep: Vec::new(),
        }
    }
}

fn bad(key: &str, value: &str, msg: impl ToString) -> ConfigError {
    ConfigError::BadValue { key: key.into(), value: value.into(), msg: msg.to_string() }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| bad(key, value, e))
}

fn flag(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

/// Formats an `rt.el` value, spelling the unbounded limit as `inf`.
pub fn format_el(el: u64) -> String {
    if el == EL_UNBOUNDED {
        "inf".into()
    } else {
        el.to_string()
    }
}

impl ExperimentConfig {
    /// Sets one scalar key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        let rt = &mut self.runtime;
        match key {
            "graph.scale" => self.graph.scale = num(key, value)?,
            "graph.edgefactor" => self.graph.edgefactor = num(key, value)?,
            "graph.max_weight" => self.graph.max_weight = num(key, value)?,
            "graph.undirected" => self.graph.undirected = flag(key, value)?,
            "graph.input" => self.graph.input = (!value.is_empty()).then(|| PathBuf::from(value)),
            "algorithm" => self.algorithm = value.parse().map_err(|e: String| bad(key, value, e))?,
            "num_ranks" => rt.num_ranks = num(key, value)?,
            "seed" => rt.seed = num(key, value)?,
            "sources" => self.sources = num(key, value)?,
            "repetitions" => self.repetitions = num(key, value)?,
            "validate" => self.validate = Some(flag(key, value)?),
            "rt.coalescing_size" => rt.coalescing_size = num(key, value)?,
            "rt.flush_period" => rt.flush_period = num(key, value)?,
            "rt.ee" => rt.ee = num(key, value)?,
            "rt.el" => {
                rt.el = match value {
                    "inf" | "infinity" => EL_UNBOUNDED,
                    _ => num(key, value)?,
                }
            }
            "rt.cache_capacity" => rt.cache_capacity = num(key, value)?,
            "rt.priority_messages" => rt.priority_messages = flag(key, value)?,
            "rt.self_send_check" => rt.self_send_check = flag(key, value)?,
            "rt.delta" => rt.delta = num(key, value)?,
            "rt.iteration_cost" => rt.iteration_cost = num(key, value)?,
            "rt.progress_cost" => rt.progress_cost = num(key, value)?,
            "rt.horizon" => rt.horizon = num(key, value)?,
            "net.base_latency" => rt.net.base_latency = num(key, value)?,
            "net.byte_cost" => rt.net.byte_cost = num(key, value)?,
            "net.send_overhead" => rt.net.send_overhead = num(key, value)?,
            "net.eager_threshold_bytes" => rt.net.eager_threshold_bytes = num(key, value)?,
            "net.rendezvous_rtt" => rt.net.rendezvous_rtt = num(key, value)?,
            "net.chunk_penalty" => rt.net.chunk_penalty = num(key, value)?,
            "net.barrier_latency" => rt.net.barrier_latency = num(key, value)?,
            _ => {
                if let Some(axis) = key.strip_prefix("sweep.") {
                    return self.add_axis(axis, value);
                }
                return Err(ConfigError::UnknownKey { key: key.into() });
            }
        }
        Ok(())
    }

    /// Declares (or replaces) a sweep axis over `key` with comma-separated values.
    pub fn add_axis(&mut self, key: &str, values: &str) -> Result<(), ConfigError> {
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
        if values.is_empty() {
            return Err(ConfigError::EmptyAxis(key.into()));
        }
        if key.starts_with("sweep.") {
            return Err(ConfigError::UnknownKey { key: key.into() });
        }
        let mut probe = self.clone();
        for v in &values {
            probe.set(key, v)?;
        }
        self.sweep.retain(|a| a.key != key);
        self.sweep.push(SweepAxis { key: key.into(), values });
        Ok(())
    }

    /// Applies `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| ConfigError::Syntax { origin: origin.into(), line: i + 1 })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.runtime.validate().map_err(ConfigError::Invalid)?;
        if self.sources < 1 {
            return Err(ConfigError::Invalid("sources must be at least 1".into()));
        }
        if self.repetitions < 1 {
            return Err(ConfigError::Invalid("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    /// Value of a scalar key as it would be written in a config file.
    pub fn get(&self, key: &str) -> Option<String> {
        let rt = &self.runtime;
        Some(match key {
            "graph.scale" => self.graph.scale.to_string(),
            "graph.edgefactor" => self.graph.edgefactor.to_string(),
            "graph.max_weight" => self.graph.max_weight.to_string(),
            "graph.undirected" => self.graph.undirected.to_string(),
            "graph.input" => self.graph.input.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "algorithm" => self.algorithm.to_string(),
            "num_ranks" => rt.num_ranks.to_string(),
            "seed" => rt.seed.to_string(),
            "sources" => self.sources.to_string(),
            "repetitions" => self.repetitions.to_string(),
            "validate" => self.validate.map(|v| v.to_string()).unwrap_or_else(|| "auto".into()),
            "rt.coalescing_size" => rt.coalescing_size.to_string(),
            "rt.flush_period" => rt.flush_period.to_string(),
            "rt.ee" => rt.ee.to_string(),
            "rt.el" => format_el(rt.el),
            "rt.cache_capacity" => rt.cache_capacity.to_string(),
            "rt.priority_messages" => rt.priority_messages.to_string(),
            "rt.self_send_check" => rt.self_send_check.to_string(),
            "rt.delta" => rt.delta.to_string(),
            "rt.iteration_cost" => rt.iteration_cost.to_string(),
            "rt.progress_cost" => rt.progress_cost.to_string(),
            "rt.horizon" => rt.horizon.to_string(),
            "net.base_latency" => rt.net.base_latency.to_string(),
            "net.byte_cost" => rt.net.byte_cost.to_string(),
            "net.send_overhead" => rt.net.send_overhead.to_string(),
            "net.eager_threshold_bytes" => rt.net.eager_threshold_bytes.to_string(),
            "net.rendezvous_rtt" => rt.net.rendezvous_rtt.to_string(),
            "net.chunk_penalty" => rt.net.chunk_penalty.to_string(),
            "net.barrier_latency" => rt.net.barrier_latency.to_string(),
            _ => return None,
        })
    }
}

/// Builds a configuration from an optional file, the seed environment
/// variable and `(key, value)` overrides, in that order of precedence.
pub fn parse_config(
    path: Option<&Path>,
    env_seed: Option<&str>,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        cfg.apply_text(&text, &path.display().to_string())?;
    }
    if let Some(seed) = env_seed {
        cfg.set("seed", seed).map_err(|_| bad(SEED_ENV, seed, "expected an unsigned integer"))?;
    }
    for (key, value) in overrides {
        cfg.set(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}
