//! Binary words and their run structure.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite word over `{0, 1}`.
///
/// Position 1 is the leftmost symbol. When a word of length `n <= 64` is
/// packed into an integer code, position 1 is the most significant bit, so
/// numeric order of codes is lexicographic order of words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Builds a word from symbols that must each be 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Invalid(format!(
                "symbols must be 0 or 1, got {bits:?}"
            )));
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    pub fn ones(len: usize) -> Self {
        Self { bits: vec![1; len] }
    }

    /// Alternating word of the given length starting with `first`.
    pub fn alternating(len: usize, first: u8) -> Self {
        Self {
            bits: (0..len).map(|i| (first + i as u8) & 1).collect(),
        }
    }

    /// Unpacks the `len` low bits of `code`, most significant first.
    pub fn from_code(code: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        Self {
            bits: (0..len)
                .map(|i| ((code >> (len - 1 - i)) & 1) as u8)
                .collect(),
        }
    }

    /// Packs the word into an integer. Only defined for `len() <= 64`.
    pub fn to_code(&self) -> u64 {
        debug_assert!(self.len() <= 64);
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// All words of length `len` in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "cannot enumerate 2^{len} words");
        (0..1u64 << len).map(move |c| BitString::from_code(c, len))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_constant(&self) -> bool {
        self.bits.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_alternating(&self) -> bool {
        self.bits.windows(2).all(|w| w[0] != w[1])
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|&b| b ^ 1).collect(),
        }
    }

    pub fn reverse(&self) -> Self {
        Self {
            bits: self.bits.iter().rev().copied().collect(),
        }
    }

    /// Maximal-run decomposition. The empty word has no runs and is rejected.
    pub fn runs(&self) -> Result<RunDecomposition> {
        if self.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let mut runs: Vec<(u8, usize)> = Vec::new();
        for &b in &self.bits {
            match runs.last_mut() {
                Some((sym, len)) if *sym == b => *len += 1,
                _ => runs.push((b, 1)),
            }
        }
        Ok(RunDecomposition { runs })
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyPattern)
        } else {
            Ok(())
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::Parse(s.to_owned())),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| Self { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| (b'0' + b) as char).collect();
        f.pad(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Ordered maximal runs `(symbol, length)`; adjacent runs differ in symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunDecomposition {
    runs: Vec<(u8, usize)>,
}

impl RunDecomposition {
    pub fn runs(&self) -> &[(u8, usize)] {
        &self.runs
    }

    pub fn count(&self) -> usize {
        self.runs.len()
    }

    pub fn expand(&self) -> BitString {
        BitString {
            bits: self
                .runs
                .iter()
                .flat_map(|&(sym, len)| std::iter::repeat_n(sym, len))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn complement_and_reverse_examples() {
        assert_eq!(bs("01010").complement(), bs("10101"));
        assert_eq!(bs("00010").reverse(), bs("01000"));
    }

    #[test]
    fn run_examples() {
        assert_eq!(bs("11000").runs().unwrap().runs(), &[(1, 2), (0, 3)]);
        assert_eq!(bs("00000").runs().unwrap().runs(), &[(0, 5)]);
        assert_eq!(
            bs("01010").runs().unwrap().runs(),
            &[(0, 1), (1, 1), (0, 1), (1, 1), (0, 1)]
        );
        assert_eq!(BitString::zeros(0).runs(), Err(Error::EmptyPattern));
    }

    #[test]
    fn exhaustive_small_words() {
        for len in 0..=12 {
            for s in BitString::all(len) {
                assert_eq!(s.complement().complement(), s);
                assert_eq!(s.reverse().reverse(), s);
                assert_eq!(s.complement().reverse(), s.reverse().complement());
                assert_eq!(BitString::from_code(s.to_code(), len), s);
                if len > 0 {
                    let runs = s.runs().unwrap();
                    assert_eq!(runs.expand(), s);
                    assert!(runs.runs().windows(2).all(|w| w[0].0 != w[1].0));
                    assert_eq!(runs.runs().iter().map(|r| r.1).sum::<usize>(), len);
                }
            }
        }
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(bs("0110").to_string(), "0110");
        assert_eq!(bs("0110").bits(), &[0, 1, 1, 0]);
        assert!("012".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().unwrap().is_empty());
        assert!(BitString::from_bits(vec![0, 2]).is_err());
    }

    #[test]
    fn lexicographic_codes() {
        let words: Vec<String> = BitString::all(2).map(|w| w.to_string()).collect();
        assert_eq!(words, ["00", "01", "10", "11"]);
        assert_eq!(BitString::alternating(5, 1), bs("10101"));
        assert!(bs("0101").is_alternating() && bs("111").is_constant());
    }
}
