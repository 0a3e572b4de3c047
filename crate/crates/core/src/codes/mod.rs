//! Superimposed codes: exact SI(k) codes and approximate counting codes.

pub mod approx;
pub mod bits;
pub mod si;

pub use approx::ApproxCode;
pub use bits::{superimpose, Codeword};
pub use si::{si_generate, DecodeResult, HashedSiCode, SiCode};

use rand::RngCore;

/// Fills `len` bits, each independently one with probability `p`
/// rounded to 16 binary digits.
pub(crate) fn bernoulli_codeword<R: RngCore>(rng: &mut R, len: usize, p: f64) -> Codeword {
    let q = (p.clamp(0.0, 1.0) * 65536.0).round() as u32;
    let words = (0..len.div_ceil(64)).map(|_| bernoulli_word(rng, q)).collect();
    Codeword::from_words(len, words)
}

/// 64 independent bits, each one with probability `q / 2^16`.
///
/// Reads the binary expansion of `q` from its lowest set digit upward:
/// a one digit ORs in a fair random word, a zero digit ANDs one in.
#[inline]
pub(crate) fn bernoulli_word<R: RngCore>(rng: &mut R, q: u32) -> u64 {
    if q == 0 {
        return 0;
    }
    if q >= 1 << 16 {
        return u64::MAX;
    }
    let mut w = 0u64;
    for digit in q.trailing_zeros()..16 {
        let r = rng.next_u64();
        w = if q >> digit & 1 == 1 { w | r } else { w & r };
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    #[test]
    fn bernoulli_word_rates() {
        let mut rng = SmallRng::seed_from_u64(5);
        for &p in &[0.5, 0.25, 0.1, 0.9, 0.022] {
            let c = bernoulli_codeword(&mut rng, 200_000, p);
            let rate = c.count_ones() as f64 / 200_000.0;
            assert!((rate - p).abs() < 0.005, "p={p} rate={rate}");
        }
        assert!(bernoulli_codeword(&mut rng, 100, 0.0).is_zero());
        assert_eq!(bernoulli_codeword(&mut rng, 100, 1.0).count_ones(), 100);
    }
}
