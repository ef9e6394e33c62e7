//! Seeded random streams.
//!
//! A stream is identified by `(seed, stream_id)`. Each maps to a ChaCha8
//! generator keyed by the seed with the stream id in the nonce, so distinct
//! ids never share keystream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Generator for stream `stream_id` under `seed`.
pub fn stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Split `total` items into `parts` contiguous chunk lengths, earlier chunks
/// taking the remainder.
pub fn split_evenly(total: u64, parts: u64) -> Vec<u64> {
    let parts = parts.max(1);
    let base = total / parts;
    let rem = total % parts;
    (0..parts).map(|i| base + u64::from(i < rem)).collect()
}
