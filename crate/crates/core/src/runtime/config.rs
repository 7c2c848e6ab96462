// SPDX-License-Identifier: Apache-2.0
use crate::simnet::NetConfig;
use crate::Time;

/// `el` value meaning "progress on every iteration".
pub const EL_UNBOUNDED: u64 = u64::MAX;

/// Every tunable of the runtime and the algorithms running on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeConfig {
    /// Messages per coalescing buffer.
    pub coalescing_size: usize,
    /// Virtual time between partial-buffer flush sweeps of a busy rank.
    pub flush_period: Time,
    /// Loop iterations between progress calls.
    pub ee: u64,
    /// Local queue size below which progress runs on every iteration.
    pub el: u64,
    /// Reduction cache slots; 0 disables the cache.
    pub cache_capacity: usize,
    pub priority_messages: bool,
    pub self_send_check: bool,
    /// Delta-stepping bucket width. DC uses it to pick priority messages.
    pub delta: u32,
    /// Cost of one loop-body iteration.
    pub iteration_cost: Time,
    /// Cost of one progress call.
    pub progress_cost: Time,
    /// Livelock guard: an epoch running longer than this is aborted.
    pub horizon: Time,
    pub net: NetConfig,
    pub seed: u64,
    pub num_ranks: usize,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        Self {
            coalescing_size: 256,
            flush_period: 20_000,
            ee: 22,
            el: 16,
            cache_capacity: 0,
            priority_messages: false,
            self_send_check: true,
            delta: 16,
            iteration_cost: 100,
            progress_cost: 50,
            horizon: 1_000_000_000_000,
            net: NetConfig::default(),
            seed: 1,
            num_ranks: 4,
        }
    }
}

impl RuntimeConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.coalescing_size < 1 {
            return Err("rt.coalescing_size must be at least 1".into());
        }
        if self.ee < 1 {
            return Err("rt.ee must be at least 1".into());
        }
        if self.delta < 1 {
            return Err("rt.delta must be at least 1".into());
        }
        if self.num_ranks < 1 {
            return Err("num_ranks must be at least 1".into());
        }
        if self.net.eager_threshold_bytes == 0 {
            return Err("net.eager_threshold_bytes must be positive".into());
        }
        Ok(())
    }

    /// Capacity of the dedicated priority buffers.
    pub fn priority_capacity(&self) -> usize {
        (self.coalescing_size / 16).max(1)
    }
}
