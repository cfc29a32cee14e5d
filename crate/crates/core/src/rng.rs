//! Seed derivation for reproducible, thread-count independent sampling.
//!
//! Every random stream is a ChaCha8 generator keyed by a user seed and
//! addressed by a stream id, so parallel consumers never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids used across the crate. Keeping them in one place avoids two
/// stages accidentally drawing from the same stream.
pub mod streams {
    pub const POINTS: u64 = 1;
    pub const MATERN_DAUGHTERS: u64 = 2;
    pub const HARDCORE_INIT: u64 = 3;
    pub const DILATION_WALK: u64 = 4;
    pub const MICROSTRUCTURE: u64 = 5;
    pub const BACKGROUND: u64 = 6;
    pub const CRACK_VALUES: u64 = 7;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for element `index` of `stream`; used for per-voxel draws.
pub fn indexed_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(index)));
    rng.set_stream(stream);
    rng
}
