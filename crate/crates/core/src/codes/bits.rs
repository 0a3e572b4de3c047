use std::fmt;

use crate::error::{arg_err, Error, Result};

/// A fixed-length bit vector. Bit 0 is the first transmitted bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    len: usize,
    words: Vec<u64>,
}

impl Codeword {
    pub fn zeros(len: usize) -> Codeword {
        Codeword {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Builds a word from packed 64-bit limbs; bits past `len` are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Codeword {
        words.resize(len.div_ceil(64), 0);
        let mut c = Codeword { len, words };
        c.clear_tail();
        c
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bit_str(s: &str) -> Result<Codeword> {
        let mut c = Codeword::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => c.set(i, true),
                _ => return arg_err(format!("bad bit {ch:?}")),
            }
        }
        Ok(c)
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in `start..end`.
    pub fn count_ones_in(&self, start: usize, end: usize) -> usize {
        debug_assert!(start <= end && end <= self.len);
        let mut total = 0;
        let mut i = start;
        while i < end {
            let w = i / 64;
            let lo = i % 64;
            let hi = (end - w * 64).min(64);
            let mask = if hi == 64 { u64::MAX } else { (1u64 << hi) - 1 } & !((1u64 << lo) - 1);
            total += (self.words[w] & mask).count_ones() as usize;
            i = w * 64 + hi;
        }
        total
    }

    pub fn or_assign(&mut self, other: &Codeword) {
        assert_eq!(self.len, other.len, "codeword length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// True if every set bit of `self` is set in `other`.
    pub fn is_covered_by(&self, other: &Codeword) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.words.len() * 16);
        for w in &self.words {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Codeword> {
        let limbs = len.div_ceil(64);
        if hex.len() != limbs * 16 {
            return arg_err(format!("expected {} hex digits, got {}", limbs * 16, hex.len()));
        }
        let words = (0..limbs)
            .map(|i| {
                u64::from_str_radix(&hex[i * 16..(i + 1) * 16], 16)
                    .map_err(|e| Error::Argument(format!("bad hex: {e}")))
            })
            .collect::<Result<Vec<u64>>>()?;
        let c = Codeword::from_words(len, words.clone());
        if c.words != words {
            return arg_err("hex row has bits past the codeword length");
        }
        Ok(c)
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword(")?;
        for i in 0..self.len.min(96) {
            write!(f, "{}", self.get(i) as u8)?;
        }
        if self.len > 96 {
            write!(f, "..")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// Bitwise OR of `words`, all of length `len`. The empty list gives the
/// all-zero word.
pub fn superimpose<'a>(len: usize, words: impl IntoIterator<Item = &'a Codeword>) -> Result<Codeword> {
    let mut out = Codeword::zeros(len);
    for w in words {
        if w.len() != len {
            return arg_err(format!(
                "codeword of length {} in a length-{len} superimposition",
                w.len()
            ));
        }
        out.or_assign(w);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn or_of_example_words() {
        let a = Codeword::from_bit_str("101101").unwrap();
        let b = Codeword::from_bit_str("101011").unwrap();
        assert_eq!(superimpose(6, [&a, &b]).unwrap().to_string(), "101111");
        assert_eq!(superimpose(6, [&a]).unwrap(), a);
        assert_eq!(superimpose(6, [&a, &a]).unwrap(), a);
        assert!(superimpose(6, []).unwrap().is_zero());
        assert!(superimpose(7, [&a]).is_err());
    }

    proptest! {
        #[test]
        fn hex_roundtrip(len in 1usize..300, seed in proptest::collection::vec(any::<u64>(), 5)) {
            let c = Codeword::from_words(len, seed);
            prop_assert_eq!(Codeword::from_hex(len, &c.to_hex()).unwrap(), c);
        }

        #[test]
        fn range_counts(len in 1usize..300, seed in proptest::collection::vec(any::<u64>(), 5), a in 0usize..300, b in 0usize..300) {
            let c = Codeword::from_words(len, seed);
            let (lo, hi) = (a.min(b).min(len), a.max(b).min(len));
            let naive = (lo..hi).filter(|&i| c.get(i)).count();
            prop_assert_eq!(c.count_ones_in(lo, hi), naive);
        }
    }
}
