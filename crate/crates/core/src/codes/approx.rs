use rand::rngs::SmallRng;
use rand::{RngCore, SeedableRng};

use super::bernoulli_codeword;
use super::bits::Codeword;
use crate::error::{arg_err, Result};
use crate::log2_ceil;
use crate::rng::{tag, RandomSource};

/// A `(1+delta)`-approximate counting code for up to `max_count`
/// superimposed codewords drawn for a universe of `universe` identifiers.
///
/// Codewords are split into blocks; in block `i` each bit is one with
/// probability `1 - 2^(-1/(1+delta)^i)`, so the OR of `j` codewords has a
/// ones-majority in block `i` roughly when `(1+delta)^i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxCode {
    universe: usize,
    max_count: usize,
    delta: f64,
    block_count: usize,
    block_len: usize,
}

impl ApproxCode {
    /// `block_constant` scales the block length `ceil(c * log2 N / delta^2)`.
    pub fn new(universe: usize, max_count: usize, delta: f64, block_constant: f64) -> Result<ApproxCode> {
        if universe < 2 {
            return arg_err("counting code universe must have at least 2 elements");
        }
        if max_count < 1 || max_count >= universe {
            return arg_err(format!("max count {max_count} must be in 1..{universe}"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return arg_err("delta must be positive");
        }
        if !(block_constant.is_finite() && block_constant > 0.0) {
            return arg_err("block constant must be positive");
        }
        let raw = ((max_count as f64).ln() / delta.ln_1p() - 1e-9).ceil();
        let block_count = (raw as usize).max(1);
        let block_len = (block_constant * log2_ceil(universe) as f64 / (delta * delta) - 1e-9).ceil() as usize;
        Ok(ApproxCode {
            universe,
            max_count,
            delta,
            block_count,
            block_len: block_len.max(1),
        })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn max_count(&self) -> usize {
        self.max_count
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn length(&self) -> usize {
        self.block_count * self.block_len
    }

    pub fn one_probability(&self, block: usize) -> f64 {
        1.0 - 2f64.powf(-1.0 / (1.0 + self.delta).powi(block as i32))
    }

    pub fn sample_with<R: RngCore>(&self, rng: &mut R) -> Codeword {
        let total = self.length();
        let mut words = vec![0u64; total.div_ceil(64) + 1];
        for b in 0..self.block_count {
            let block = bernoulli_codeword(rng, self.block_len, self.one_probability(b));
            let offset = b * self.block_len;
            let (limb, shift) = (offset / 64, offset % 64);
            for (i, &w) in block.words().iter().enumerate() {
                words[limb + i] |= w << shift;
                if shift != 0 {
                    words[limb + i + 1] |= w >> (64 - shift);
                }
            }
        }
        Codeword::from_words(total, words)
    }

    /// One codeword drawn from the stream named by `key`.
    pub fn sample(&self, seed: &RandomSource, key: &[u64]) -> Codeword {
        let mut k = vec![tag::APPROX];
        k.extend_from_slice(key);
        let mut rng = SmallRng::seed_from_u64(seed.draw(&k));
        self.sample_with(&mut rng)
    }

    fn check(&self, word: &Codeword) -> Result<()> {
        if word.len() != self.length() {
            return arg_err(format!(
                "word of length {} for a length-{} code",
                word.len(),
                self.length()
            ));
        }
        Ok(())
    }

    /// Largest block whose ones strictly outnumber its zeros.
    pub fn top_majority_block(&self, word: &Codeword) -> Result<Option<usize>> {
        self.check(word)?;
        Ok((0..self.block_count).rev().find(|&b| {
            let ones = word.count_ones_in(b * self.block_len, (b + 1) * self.block_len);
            2 * ones > self.block_len
        }))
    }

    /// Estimated number of superimposed codewords.
    pub fn decode(&self, word: &Codeword) -> Result<f64> {
        Ok(match self.top_majority_block(word)? {
            Some(b) => (1.0 + self.delta).powi(b as i32),
            None if word.is_zero() => 0.0,
            None => 1.0,
        })
    }

    /// The estimate as an integer level: 0 for the zero word, otherwise
    /// one more than the top majority block (or 1 without one). The
    /// estimate is `(1+delta)^(level-1)`.
    pub fn level(&self, word: &Codeword) -> Result<u32> {
        Ok(match self.top_majority_block(word)? {
            Some(b) => b as u32 + 1,
            None if word.is_zero() => 0,
            None => 1,
        })
    }

    /// Bits needed to write any level.
    pub fn level_bits(&self) -> u32 {
        usize::BITS - self.block_count.leading_zeros()
    }
}
