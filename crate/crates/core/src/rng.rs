//! Deterministic random streams.
//!
//! Every random consumer draws from a ChaCha8 stream keyed by a global seed and
//! a stream id, so results do not depend on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Stream ids below this value are reserved for generator bookkeeping; callers
/// that key streams by an index (vertex, community) add this offset.
pub const INDEXED_STREAM_BASE: u64 = 1 << 32;
