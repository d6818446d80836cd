//! Seeded random streams.
//!
//! Every stochastic component takes `&mut R where R: Rng`; the helpers here
//! build the portable ChaCha stream used by campaigns and experiments so that
//! a `u64` seed reproduces the same bytes on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream type used by campaigns and experiments.
pub type FuzzRng = ChaCha8Rng;

/// Build the stream for `seed`.
pub fn seeded_rng(seed: u64) -> FuzzRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent sub-seed for stream number `stream` of `base`
/// (splitmix64 finalizer over the pair).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `len` pseudo-random bytes from the stream of `seed`.
pub fn random_bytes(len: usize, seed: u64) -> Vec<u8> {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    (0..len).map(|_| rng.gen()).collect()
}
