use std::collections::HashSet;
use std::fmt::Write as _;

use super::bernoulli_codeword;
use super::bits::{superimpose, Codeword};
use crate::error::{arg_err, Error, Result};
use crate::log2_ceil;
use crate::rng::{tag, RandomSource};

const MAX_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeResult {
    /// The word is the superimposition of exactly these codewords.
    ExactSet(Vec<u64>),
    MoreThanK,
}

/// `4 (k+1)^2 ceil(log2 N)`.
pub fn si_length(universe: usize, strength: usize) -> usize {
    4 * (strength + 1) * (strength + 1) * log2_ceil(universe) as usize
}

/// A superimposed code of strength `k` over the universe `0..N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiCode {
    universe: usize,
    strength: usize,
    length: usize,
    codewords: Vec<Codeword>,
    verified: bool,
}

/// Samples an SI(k) code. Small codes (`N <= 64`, `k <= 2`) are checked
/// exhaustively and resampled until the check passes.
pub fn si_generate(universe: usize, strength: usize, seed: &RandomSource) -> Result<SiCode> {
    if universe < 2 {
        return arg_err("SI code universe must have at least 2 elements");
    }
    if strength < 1 {
        return arg_err("SI code strength must be at least 1");
    }
    if strength >= universe {
        return arg_err(format!("strength {strength} must be below universe size {universe}"));
    }
    let length = si_length(universe, strength);
    let p = 1.0 / (strength + 1) as f64;
    let check = universe <= 64 && strength <= 2;
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seed.rng(&[tag::CODE, universe as u64, strength as u64, attempt]);
        let codewords: Vec<Codeword> = (0..universe).map(|_| bernoulli_codeword(&mut rng, length, p)).collect();
        let distinct = codewords.iter().collect::<HashSet<_>>().len() == universe;
        if !distinct {
            continue;
        }
        let mut code = SiCode {
            universe,
            strength,
            length,
            codewords,
            verified: false,
        };
        if !check {
            return Ok(code);
        }
        if code.satisfies_cover_property() {
            code.verified = true;
            return Ok(code);
        }
        last = Some(code);
    }
    last.ok_or_else(|| Error::Argument("could not sample distinct codewords".into()))
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl SiCode {
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    pub fn codeword(&self, id: usize) -> &Codeword {
        &self.codewords[id]
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    /// No codeword is covered by the OR of `k` or fewer other codewords.
    /// This holds iff every OR of at most `k` codewords is unique and
    /// differs from every OR of more than `k`.
    pub fn satisfies_cover_property(&self) -> bool {
        let n = self.universe;
        let k = self.strength.min(n - 1);
        let mut others = vec![0usize; k];
        for target in 0..n {
            let rest: Vec<usize> = (0..n).filter(|&i| i != target).collect();
            for (i, o) in others.iter_mut().enumerate() {
                *o = i;
            }
            loop {
                let or =
                    superimpose(self.length, others.iter().map(|&i| &self.codewords[rest[i]])).expect("lengths agree");
                if self.codewords[target].is_covered_by(&or) {
                    return false;
                }
                if !next_combination(&mut others, rest.len()) {
                    break;
                }
            }
        }
        true
    }

    pub fn superimpose_ids(&self, ids: &[usize]) -> Codeword {
        superimpose(self.length, ids.iter().map(|&i| &self.codewords[i])).expect("lengths agree")
    }

    pub fn decode(&self, word: &Codeword) -> Result<DecodeResult> {
        if word.len() != self.length {
            return arg_err(format!(
                "word of length {} for a length-{} code",
                word.len(),
                self.length
            ));
        }
        let members: Vec<u64> = (0..self.universe)
            .filter(|&i| self.codewords[i].is_covered_by(word))
            .map(|i| i as u64)
            .collect();
        Ok(finish_decode(self.strength, self.length, word, members, |i| {
            &self.codewords[i as usize]
        }))
    }

    /// Text dump: header `N k l`, then one hex row per codeword.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.universe, self.strength, self.length);
        for c in &self.codewords {
            let _ = writeln!(s, "{}", c.to_hex());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SiCode> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields: Vec<usize> = header
            .split_whitespace()
            .map(|f| f.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: 1,
                msg: format!("bad header {header:?}"),
            })?;
        let [universe, strength, length] = fields[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be `N k l`".into(),
            });
        };
        if universe < 2 || strength < 1 || strength >= universe || length != si_length(universe, strength) {
            return Err(Error::Parse {
                line: 1,
                msg: "inconsistent code parameters".into(),
            });
        }
        let mut codewords = Vec::with_capacity(universe);
        for (i, row) in lines {
            let c = Codeword::from_hex(length, row.trim()).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            codewords.push(c);
        }
        if codewords.len() != universe {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {universe} codewords, found {}", codewords.len()),
            });
        }
        let mut code = SiCode {
            universe,
            strength,
            length,
            codewords,
            verified: false,
        };
        code.verified = universe <= 64 && strength <= 2 && code.satisfies_cover_property();
        Ok(code)
    }
}

fn finish_decode<'a>(
    strength: usize,
    length: usize,
    word: &Codeword,
    members: Vec<u64>,
    codeword: impl Fn(u64) -> &'a Codeword,
) -> DecodeResult {
    if members.len() > strength {
        return DecodeResult::MoreThanK;
    }
    let or = superimpose(length, members.iter().map(|&i| codeword(i))).expect("lengths agree");
    if &or == word {
        DecodeResult::ExactSet(members)
    } else {
        DecodeResult::MoreThanK
    }
}

/// An SI(k) code over `id_bits`-bit identifiers whose codewords are
/// derived on demand from a shared seed, for universes too large to
/// tabulate. Decoding only considers a given list of identifiers.
#[derive(Debug, Clone)]
pub struct HashedSiCode {
    strength: usize,
    length: usize,
    source: RandomSource,
}

impl HashedSiCode {
    pub fn new(id_bits: u32, strength: usize, source: RandomSource) -> Result<HashedSiCode> {
        if strength < 1 {
            return arg_err("SI code strength must be at least 1");
        }
        if id_bits == 0 || id_bits > 63 {
            return arg_err("identifier width must be 1..=63 bits");
        }
        Ok(HashedSiCode {
            strength,
            length: 4 * (strength + 1) * (strength + 1) * id_bits as usize,
            source,
        })
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn codeword(&self, id: u64) -> Codeword {
        let mut rng = self.source.rng(&[tag::CODE, self.strength as u64, id]);
        bernoulli_codeword(&mut rng, self.length, 1.0 / (self.strength + 1) as f64)
    }

    /// Codewords of `ids`, for repeated decoding against the same list.
    pub fn codebook(&self, ids: &[u64]) -> Vec<(u64, Codeword)> {
        ids.iter().map(|&id| (id, self.codeword(id))).collect()
    }

    /// Decodes `word` assuming every contributing identifier is in `ids`.
    pub fn decode_among(&self, word: &Codeword, ids: &[u64]) -> Result<DecodeResult> {
        self.decode_in(word, &self.codebook(ids))
    }

    /// [`decode_among`](Self::decode_among) with precomputed codewords.
    pub fn decode_in(&self, word: &Codeword, book: &[(u64, Codeword)]) -> Result<DecodeResult> {
        if word.len() != self.length {
            return arg_err(format!(
                "word of length {} for a length-{} code",
                word.len(),
                self.length
            ));
        }
        let mut members: Vec<u64> = book
            .iter()
            .filter(|(_, c)| c.is_covered_by(word))
            .map(|(id, _)| *id)
            .collect();
        members.sort_unstable();
        members.dedup();
        let lookup = |id: u64| &book.iter().find(|(i, _)| *i == id).expect("member").1;
        Ok(finish_decode(self.strength, self.length, word, members, lookup))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        assert_eq!(si_length(16, 1), 64);
        assert_eq!(si_length(16, 2), 144);
        assert!(si_generate(4, 4, &RandomSource::new(1)).is_err());
        assert!(si_generate(1, 1, &RandomSource::new(1)).is_err());
    }

    #[test]
    fn deterministic_and_verified() {
        let a = si_generate(8, 1, &RandomSource::new(3)).unwrap();
        let b = si_generate(8, 1, &RandomSource::new(3)).unwrap();
        assert_eq!(a, b);
        assert!(a.verified());
        assert_eq!(a.length(), 4 * 4 * 3);
    }

    #[test]
    fn decode_basics() {
        let code = si_generate(10, 2, &RandomSource::new(9)).unwrap();
        assert!(code.verified());
        assert_eq!(
            code.decode(&code.superimpose_ids(&[3])).unwrap(),
            DecodeResult::ExactSet(vec![3])
        );
        assert_eq!(
            code.decode(&Codeword::zeros(code.length())).unwrap(),
            DecodeResult::ExactSet(vec![])
        );
        assert_eq!(
            code.decode(&code.superimpose_ids(&[1, 2, 3])).unwrap(),
            DecodeResult::MoreThanK
        );
        assert!(code.decode(&Codeword::zeros(3)).is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let code = si_generate(12, 2, &RandomSource::new(4)).unwrap();
        let back = SiCode::from_text(&code.to_text()).unwrap();
        assert_eq!(back, code);
        assert!(SiCode::from_text("12 2 10\n").is_err());
    }

    #[test]
    fn hashed_code_decodes_small_sets() {
        let code = HashedSiCode::new(24, 3, RandomSource::new(8)).unwrap();
        let ids: Vec<u64> = (0..20).map(|i| 1_000 + 7919 * i).collect();
        let word = superimpose(code.length(), [&code.codeword(ids[2]), &code.codeword(ids[5])]).unwrap();
        assert_eq!(
            code.decode_among(&word, &ids).unwrap(),
            DecodeResult::ExactSet(vec![ids[2], ids[5]])
        );
        let many: Vec<Codeword> = ids[..5].iter().map(|&i| code.codeword(i)).collect();
        let word = superimpose(code.length(), &many).unwrap();
        assert_eq!(code.decode_among(&word, &ids).unwrap(), DecodeResult::MoreThanK);
    }
}
