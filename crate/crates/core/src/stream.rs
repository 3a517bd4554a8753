//! Seeded random streams and child-stream derivation.
//!
//! Every trial owns one stream derived from the master seed and the
//! trial's coordinates, so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream type used throughout the engine.
pub type Stream = ChaCha8Rng;

/// Builds a stream from a 64-bit seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` keyed by an ordered list of indices.
pub fn child_seed(master: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(splitmix64(master), |acc, &k| {
        splitmix64(acc ^ splitmix64(k))
    })
}

/// Key namespaces, so that streams for different purposes never collide.
pub mod keys {
    pub const TRIAL: u64 = 0x7472_6961_6c00_0000;
    pub const LEXICON: u64 = 0x6c65_7869_636f_6e00;
    pub const CORRUPTION: u64 = 0x636f_7272_7570_7400;
}
