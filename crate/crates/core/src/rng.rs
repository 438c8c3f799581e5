//! Seeded random streams.
//!
//! A 64-bit seed and a stream index map to a ChaCha8 generator via
//! `ChaCha8Rng::seed_from_u64(seed)` followed by `set_stream(index)`. Uniform
//! base noise is drawn as `((next_u64() >> 12) + 0.5) * 2^-52`, which always
//! lies strictly inside `(0, 1)`. This mapping is part of the public contract:
//! a given `(seed, stream)` yields the same draws across releases.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Generator for stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One uniform draw strictly inside `(0, 1)`.
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// `dim` independent uniform draws strictly inside `(0, 1)`.
pub fn open_unit_vec<R: RngCore + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| open_unit(rng)).collect()
}
