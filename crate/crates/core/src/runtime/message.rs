// SPDX-License-Identifier: Apache-2.0
use crate::{Distance, VertexId};

/// Bytes per record on the wire: u64 vertex + u32 distance, little-endian.
pub const WIRE_SIZE: usize = 12;

/// The `(vertex, distance)` active message every algorithm exchanges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DistanceMessage {
    pub vertex: VertexId,
    pub distance: Distance,
}

impl DistanceMessage {
    pub fn new(vertex: VertexId, distance: Distance) -> Self {
        Self { vertex, distance }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("corrupt payload: {len} bytes is not a multiple of {WIRE_SIZE}")]
pub struct CorruptPayload {
    pub len: usize,
}

/// Concatenates the 12-byte records of `msgs`.
pub fn serialize(msgs: &[DistanceMessage]) -> Vec<u8> {
    let mut out = Vec::with_capacity(msgs.len() * WIRE_SIZE);
    for m in msgs {
        out.extend_from_slice(&m.vertex.to_le_bytes());
        out.extend_from_slice(&m.distance.to_le_bytes());
    }
    out
}

pub fn deserialize(payload: &[u8]) -> Result<Vec<DistanceMessage>, CorruptPayload> {
    if !payload.len().is_multiple_of(WIRE_SIZE) {
        return Err(CorruptPayload { len: payload.len() });
    }
    Ok(payload
        .chunks_exact(WIRE_SIZE)
        .map(|rec| {
            let vertex = u64::from_le_bytes(rec[..8].try_into().unwrap());
            let distance = u32::from_le_bytes(rec[8..].try_into().unwrap());
            DistanceMessage { vertex, distance }
        })
        .collect())
}
