//! Counter-based seeding.
//!
//! Every random quantity is derived from a master seed plus a tuple of
//! coordinates, never from a shared generator, so the value drawn for a given
//! coordinate does not depend on which thread evaluates it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a coordinate tuple into a single 64-bit key.
pub fn substream_key(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(mix64(master), |acc, &c| mix64(acc ^ mix64(c)))
}

/// A ChaCha8 generator keyed by `(master, coords)`.
pub fn substream(master: u64, coords: &[u64]) -> ChaCha8Rng {
    let key = substream_key(master, coords);
    let mut seed = [0u8; 32];
    let mut word = key;
    for chunk in seed.chunks_exact_mut(8) {
        word = mix64(word);
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Uniform on the open interval (0, 1) from a 64-bit word.
#[inline]
fn open_unit(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal variate addressed by `(seed, index)` (Box-Muller, cosine
/// branch). Stateless: any subset of indices can be evaluated independently.
#[inline]
pub fn normal_at(seed: u64, index: u64) -> f64 {
    let base = mix64(seed ^ mix64(index.wrapping_mul(2)));
    let u1 = open_unit(mix64(base));
    let u2 = open_unit(mix64(base ^ 0x5851_f42d_4c95_7f2d));
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
