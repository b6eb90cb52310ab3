//! Seed derivation so every pipeline stage gets its own reproducible stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One round of splitmix64.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for sub-stream `stream` of `master`: `splitmix64(master ⊕ splitmix64(stream))`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Named sub-streams of a master seed.
pub mod stream {
    pub const SPLIT: u64 = 1;
    pub const GAN: u64 = 2;
    pub const AUGMENT: u64 = 3;
    pub const CLASSIFIER: u64 = 4;
    pub const GAN_TRAINING: u64 = 5;
}
