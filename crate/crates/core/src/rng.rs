//! Counter-based random streams.
//!
//! A stream is a ChaCha8 keystream whose 256-bit key is derived from
//! `(seed, stream_id)`. Sub-streams get fresh keys from a ChaCha20 keyed by
//! the parent key and addressed by the sub-stream index, so any sub-stream can
//! be reached in O(1) without generating its predecessors. Trajectories key
//! increment `i` on `substream(i)`, which makes parallel and serial generation
//! identical draw for draw.

use std::f64::consts::FRAC_PI_2;

use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use rand_core::{RngCore, SeedableRng};

const DERIVATION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct RngStream {
    key: [u8; 32],
    generator: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&stream_id.to_le_bytes());
        Self::from_key(key)
    }

    fn from_key(key: [u8; 32]) -> Self {
        RngStream { key, generator: ChaCha8Rng::from_seed(key) }
    }

    /// Independent child stream number `index`. Does not advance `self`.
    pub fn substream(&self, index: u64) -> RngStream {
        let mut derive = ChaCha20Rng::from_seed(self.key);
        derive.set_stream(DERIVATION_STREAM);
        derive.set_word_pos(u128::from(index) * 8);
        let mut key = [0u8; 32];
        derive.fill_bytes(&mut key);
        Self::from_key(key)
    }

    /// New independent stream keyed by the next 256 bits of `self`.
    pub fn split(&mut self) -> RngStream {
        let mut key = [0u8; 32];
        self.generator.fill_bytes(&mut key);
        Self::from_key(key)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.generator.next_u64()
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (−π/2, π/2); draws with cos U = 0 are redrawn.
    pub fn uniform_angle(&mut self) -> f64 {
        loop {
            let u = std::f64::consts::PI * (self.uniform() - 0.5);
            if u.cos() > 0.0 && u.abs() < FRAC_PI_2 {
                return u;
            }
        }
    }

    /// Standard exponential by inversion, −log(1 − U′).
    pub fn exponential(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u < 1.0 {
                return -(-u).ln_1p();
            }
        }
    }
}
