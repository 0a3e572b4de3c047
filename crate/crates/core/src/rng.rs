//! Keyed, counter-based randomness.
//!
//! Every coin a protocol flips is a pure function of the master seed and a
//! key such as `(purpose, trial, node, round)`. Iteration order, extra
//! instrumentation or skipped work therefore never shifts a draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags that separate independent streams.
pub mod tag {
    pub const CANDIDATE: u64 = 0x01;
    pub const CANDIDATE_ID: u64 = 0x02;
    pub const DECAY: u64 = 0x10;
    pub const FAST_DECAY: u64 = 0x11;
    pub const LONG_PHASE: u64 = 0x12;
    pub const CLUSTER_STEP1: u64 = 0x20;
    pub const CLUSTER_STEP2: u64 = 0x21;
    pub const CLUSTER_STEP4: u64 = 0x23;
    pub const REFINE_GROW: u64 = 0x24;
    pub const REFINE_BOUNDARY: u64 = 0x25;
    pub const CLUSTER_SHARED: u64 = 0x26;
    pub const CAST: u64 = 0x30;
    pub const INTERCOM: u64 = 0x31;
    pub const INTERCOM_SHARED: u64 = 0x32;
    pub const OVERLAY: u64 = 0x33;
    pub const ELIMINATION: u64 = 0x34;
    pub const CODE: u64 = 0x40;
    pub const APPROX: u64 = 0x41;
    pub const GRAPH: u64 = 0x50;
    pub const TRIAL: u64 = 0x60;
    pub const FINAL: u64 = 0x70;
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn absorb(state: u64, word: u64) -> u64 {
    mix64(
        state
            ^ word
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(0x632b_e59b_d9b4_e019),
    )
}

/// A master seed from which all keyed streams derive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    pub master_seed: u64,
}

impl RandomSource {
    pub fn new(master_seed: u64) -> Self {
        RandomSource { master_seed }
    }

    /// A child source whose draws are independent of the parent's for
    /// every key. Used to give each trial or debate its own namespace.
    pub fn derive(&self, key: &[u64]) -> RandomSource {
        RandomSource::new(self.draw(key))
    }

    /// One uniformly distributed 64-bit word for `key`.
    #[inline]
    pub fn draw(&self, key: &[u64]) -> u64 {
        let mut s = mix64(self.master_seed ^ 0x5851_f42d_4c95_7f2d);
        for &k in key {
            s = absorb(s, k);
        }
        mix64(s)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit(&self, key: &[u64]) -> f64 {
        (self.draw(key) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&self, p: f64, key: &[u64]) -> bool {
        if p >= 1.0 {
            return true;
        }
        self.unit(key) < p
    }

    /// True with probability exactly `2^-exp`.
    #[inline]
    pub fn coin_pow2(&self, exp: u32, key: &[u64]) -> bool {
        match exp {
            0 => true,
            e if e >= 64 => false,
            e => self.draw(key) >> (64 - e) == 0,
        }
    }

    /// A seeded generator for bulk sampling (graphs, codewords).
    pub fn rng(&self, key: &[u64]) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.draw(key))
    }
}
