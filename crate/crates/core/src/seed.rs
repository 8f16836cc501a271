//! Deterministic seed expansion.
//!
//! Every run takes one `u64` seed. Replicate `i` draws from the ChaCha stream
//! `i` keyed by that seed, so replicate streams are independent of each other
//! and of the order in which threads execute them.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for replicate `stream` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A per-replicate `u64` seed; feeding it back to a seeded entry point
/// reproduces that replicate on its own.
pub fn replicate_seed(seed: u64, stream: u64) -> u64 {
    replicate_rng(seed, stream).next_u64()
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
