// SPDX-License-Identifier: Apache-2.0
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, EdgeList, GraphError};

/// Largest scale accepted by the generator.
pub const MAX_SCALE: u32 = 30;

/// Graph500 initiator matrix `[A, B, C, D]`.
pub const KRONECKER_INITIATOR: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

/// Samples `2^scale * edgefactor` edges from the recursive Kronecker
/// distribution and drops self-loops. Weights are uniform on `[1, max_weight]`.
pub fn generate_kronecker(scale: u32, edgefactor: u32, max_weight: u32, seed: u64) -> Result<EdgeList, GraphError> {
    let mut raw = kronecker_samples(scale, edgefactor, max_weight, seed)?;
    raw.edges.retain(|e| e.src != e.dst);
    Ok(raw)
}

/// The raw sample stream behind [`generate_kronecker`], self-loops included.
///
/// The bit-by-bit quadrant choice follows the Graph500 reference generator:
/// the row bit is set with probability `C + D`, and the column bit is then
/// drawn from the conditional distribution of the chosen row half.
pub fn kronecker_samples(scale: u32, edgefactor: u32, max_weight: u32, seed: u64) -> Result<EdgeList, GraphError> {
    if scale < 1 {
        return Err(GraphError::InvalidParameter("scale must be at least 1"));
    }
    if scale > MAX_SCALE {
        return Err(GraphError::ScaleTooLarge(scale));
    }
    if edgefactor < 1 {
        return Err(GraphError::InvalidParameter("edgefactor must be at least 1"));
    }
    if max_weight < 1 {
        return Err(GraphError::InvalidParameter("max_weight must be at least 1"));
    }

    let n = 1u64 << scale;
    let samples = n * u64::from(edgefactor);
    let [a, b, c, _] = KRONECKER_INITIATOR;
    let ab = a + b;
    let c_norm = c / (1.0 - ab);
    let a_norm = a / ab;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let (mut src, mut dst) = (0u64, 0u64);
        for bit in 0..scale {
            let row = rng.gen::<f64>() > ab;
            let threshold = if row { c_norm } else { a_norm };
            let col = rng.gen::<f64>() > threshold;
            src |= u64::from(row) << bit;
            dst |= u64::from(col) << bit;
        }
        let weight = rng.gen_range(1..=max_weight);
        edges.push(Edge::new(src, dst, weight));
    }
    Ok(EdgeList::new(n, edges))
}
