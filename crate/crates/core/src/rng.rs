//! Deterministic random substreams.
//!
//! Every sampler takes a `u64` seed. Replicates and the independent sources
//! inside one sampler (Brownian increments, jump clocks, thinning marks, ...)
//! draw from substreams derived from `(seed, key)` through a SplitMix64 mix,
//! so work can be split across threads without changing any result.

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

/// Generator used by all samplers.
pub type SimRng = Pcg64Mcg;

pub(crate) const STREAM_EDGES: u64 = 0x11;
pub(crate) const STREAM_CLOCKS: u64 = 0x12;
pub(crate) const STREAM_BROWNIAN: u64 = 0x21;
pub(crate) const STREAM_JUMPS: u64 = 0x22;
pub(crate) const STREAM_ETA: u64 = 0x23;
pub(crate) const STREAM_MARKS: u64 = 0x31;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Seed for replicate `r` of an experiment run with `seed`.
pub fn replicate_seed(seed: u64, r: u64) -> u64 {
    derive_seed(seed, r)
}

/// Generator for the substream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(seed, stream))
}
