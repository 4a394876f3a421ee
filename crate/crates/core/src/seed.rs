//! Deterministic seed derivation.
//!
//! Every randomized component takes an explicit `u64` seed. Sub-seeds for
//! folds, starts and components are derived with a SplitMix64 mix so that
//! they are stable across platforms and toolchain versions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed for stream `index` of `seed`.
pub fn derive(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Tags for the components of a trained model.
pub mod stream {
    pub const DIRECTIONS: u64 = 1;
    pub const MCD: u64 = 2;
    pub const DEGREE_CV: u64 = 3;
    pub const TREATMENT: u64 = 4;
    pub const KNN_TIES: u64 = 5;
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
