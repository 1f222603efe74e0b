//! Seed derivation for reproducible random streams.
//!
//! Every stochastic operation takes an explicit `u64` seed. Sub-streams
//! (per condition, per repeat, per Monte Carlo trial) are derived by
//! mixing the parent seed with a domain tag and an index through
//! SplitMix64, then seeding a ChaCha8 generator. ChaCha8 output is
//! specified bit-for-bit, so identical seeds give identical bits on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PufRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed`, a domain `tag` and an `index`.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h = splitmix64(seed);
    for b in tag.bytes() {
        h = splitmix64(h ^ b as u64);
    }
    splitmix64(h ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> PufRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(seed: u64, tag: &str, index: u64) -> PufRng {
    rng_from_seed(derive_seed(seed, tag, index))
}
