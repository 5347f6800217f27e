//! Seeded random streams.
//!
//! All sampling uses ChaCha8, a counter-based generator: a `(seed, stream)`
//! pair fixes the sequence, so per-sample streams give the same results
//! whether samples are drawn sequentially or on many threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
