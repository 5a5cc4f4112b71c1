//! Deterministic scenario randomness.
//!
//! All scenario randomness flows from one 64-bit seed through a ChaCha20
//! stream: the key holds the seed as little-endian bytes 0..8 (zeros
//! elsewhere), stream position starts at zero. Uniform doubles use the
//! standard 53-bit mantissa mapping `(next_u64 >> 11) * 2^-53`, so traces
//! reproduce bit-for-bit across implementations of the same recipe.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub struct SimRng {
    inner: ChaCha20Rng,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self { inner: ChaCha20Rng::from_seed(key) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in [0, n).
    pub fn index(&mut self, n: u32) -> u32 {
        (self.unit() * n as f64) as u32 % n
    }
}
