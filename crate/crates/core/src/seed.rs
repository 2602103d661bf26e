//! Deterministic seed derivation.
//!
//! Every random stream in the crate (HotTopic levels, random linear weights,
//! individual runs of a batch) is seeded by [`mix`]ing a master seed with a
//! counter. Stream `i` can therefore be created without touching streams `< i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for all simulations.
pub type SimRng = ChaCha8Rng;

/// Counter-based mixing of `(seed, index)` into a fresh 64-bit seed
/// (SplitMix64 finaliser applied twice).
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ splitmix(index.wrapping_add(0x9e37_79b9_7f4a_7c15));
    z = splitmix(z);
    splitmix(z ^ index)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(mix(seed, index))
}
