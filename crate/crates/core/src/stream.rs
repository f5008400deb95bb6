//! Seed-derived RNG streams.
//!
//! Every randomized routine in this crate draws from
//! `stream_rng(seed, index)`, one independent ChaCha stream per work item,
//! so parallel and serial schedules consume identical randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
