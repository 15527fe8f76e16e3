//! Deterministic random streams.
//!
//! Every stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by
//! `seed_from_u64(seed)`, with the 64-bit ChaCha stream id selecting the
//! substream. Substreams of one seed share a key but never share keystream
//! blocks. Variates use fixed bit recipes so other languages can reproduce
//! them exactly:
//!
//! * unit double: `(next_u64 >> 11) · 2^-53`, in `[0, 1)`
//! * fair coin: the top bit of `next_u64` (0 means heads)
//!
//! Normal variates are only used for synthetic test data and are not part
//! of the bank format.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Name of the generator algorithm, recorded in docs and run sidecars.
pub const GENERATOR_NAME: &str = "chacha8/seed_from_u64/stream-id-substreams";

#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `lo + (hi − lo)·u` with `u` a unit double.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit_f64()
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 0
    }

    /// Standard normal variate (ziggurat, via `rand_distr`).
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Index in `0..n`, uniform up to a bias below 2^-53·n.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.unit_f64() * n as f64) as usize).min(n - 1)
    }
}

/// SplitMix64 finalizer, used to derive per-restart seeds.
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
