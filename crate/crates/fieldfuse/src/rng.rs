//! Counter-based seed derivation.
//!
//! Every stochastic component draws from a `ChaCha8Rng` seeded by mixing a
//! base seed with a stream identifier (e.g. pixel coordinates), so results do
//! not depend on scheduling order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche for cheap seed mixing.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a base seed and a list of stream identifiers.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = mix(base);
    for &p in parts {
        state = mix(state ^ p);
    }
    state
}

/// RNG for one stream, e.g. `stream_rng(seed, &[px as u64, py as u64])`.
pub fn stream_rng(base: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, parts))
}
