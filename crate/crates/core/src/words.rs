//! Finite 0/1 words: the index set of binary-tree-shaped families.
//!
//! Words are stored little-endian in a `u64` (bit `i` is the letter at
//! position `i`), so `value()` — the number Σ sᵢ·2^i — is just the raw bits.
//! Lengths are capped at 63, far beyond any working depth in this toolkit.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A finite binary word `s ∈ 2^{<ω}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinWord {
    bits: u64,
    len: u32,
}

impl BinWord {
    pub const MAX_LEN: u32 = 63;

    pub fn empty() -> Self {
        BinWord { bits: 0, len: 0 }
    }

    /// Word from explicit letters, first letter at position 0.
    pub fn from_bits(letters: &[u8]) -> Self {
        assert!(letters.len() as u32 <= Self::MAX_LEN);
        let mut bits = 0u64;
        for (i, &b) in letters.iter().enumerate() {
            assert!(b <= 1, "letters must be 0/1");
            bits |= (b as u64) << i;
        }
        BinWord {
            bits,
            len: letters.len() as u32,
        }
    }

    /// Parse from a string of '0'/'1' characters ("" or "e" for the empty word).
    pub fn parse(s: &str) -> Option<Self> {
        if s == "e" || s.is_empty() {
            return Some(Self::empty());
        }
        if s.len() as u32 > Self::MAX_LEN {
            return None;
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return None,
            }
        }
        Some(BinWord {
            bits,
            len: s.len() as u32,
        })
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: u32) -> u8 {
        assert!(i < self.len);
        ((self.bits >> i) & 1) as u8
    }

    pub fn last(&self) -> Option<u8> {
        if self.len == 0 {
            None
        } else {
            Some(self.bit(self.len - 1))
        }
    }

    /// The number Σ sᵢ 2^i encoded by the word (its "value").
    pub fn value(&self) -> u64 {
        self.bits
    }

    pub fn push(&self, b: u8) -> Self {
        assert!(b <= 1);
        assert!(self.len < Self::MAX_LEN);
        BinWord {
            bits: self.bits | ((b as u64) << self.len),
            len: self.len + 1,
        }
    }

    pub fn concat(&self, other: &BinWord) -> Self {
        assert!(self.len + other.len <= Self::MAX_LEN);
        BinWord {
            bits: self.bits | (other.bits << self.len),
            len: self.len + other.len,
        }
    }

    pub fn prefix(&self, n: u32) -> Self {
        assert!(n <= self.len);
        BinWord {
            bits: self.bits & ((1u64 << n) - 1),
            len: n,
        }
    }

    pub fn parent(&self) -> Option<Self> {
        if self.len == 0 {
            None
        } else {
            Some(self.prefix(self.len - 1))
        }
    }

    pub fn is_prefix_of(&self, other: &BinWord) -> bool {
        self.len <= other.len && other.bits & ((1u64 << self.len) - 1) == self.bits
    }

    /// Neither extends the other.
    pub fn incomparable(&self, other: &BinWord) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// Coordinatewise sum mod 2 with another word of the same length.
    pub fn xor(&self, other: &BinWord) -> Self {
        assert_eq!(self.len, other.len);
        BinWord {
            bits: self.bits ^ other.bits,
            len: self.len,
        }
    }

    /// Last letter flipped; panics on the empty word.
    pub fn flip_last(&self) -> Self {
        assert!(self.len > 0);
        BinWord {
            bits: self.bits ^ (1u64 << (self.len - 1)),
            len: self.len,
        }
    }

    /// Number of 1-letters.
    pub fn ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Level-order index: idx(∅)=0 and idx(s⌢b) = 2·idx(s) + 1 + ... such that
    /// idx(s) = 2^{|s|} + value(s) − 1. Bijection 2^{<ω} ↔ ω.
    pub fn idx(&self) -> u64 {
        (1u64 << self.len) + self.bits - 1
    }

    /// Inverse of `idx`.
    pub fn from_idx(i: u64) -> Self {
        let v = i + 1;
        let len = 63 - v.leading_zeros();
        BinWord {
            bits: v & ((1u64 << len) - 1),
            len,
        }
    }

    /// All words of the given length, in value order.
    pub fn level(len: u32) -> impl Iterator<Item = BinWord> {
        (0..(1u64 << len)).map(move |bits| BinWord { bits, len })
    }

    /// All words of length ≤ depth, level by level.
    pub fn up_to(depth: u32) -> impl Iterator<Item = BinWord> {
        (0..=depth).flat_map(Self::level)
    }

    pub fn letters(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    /// Plain digit string, empty for the empty word — unlike `Display`,
    /// which renders the empty word as "e".
    pub fn digits(&self) -> String {
        (0..self.len)
            .map(|i| char::from(b'0' + self.bit(i)))
            .collect()
    }
}

impl fmt::Display for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return write!(f, "e");
        }
        for i in 0..self.len {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w\"{}\"", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_idx_table() {
        // Level order with the little-endian value convention.
        assert_eq!(BinWord::empty().idx(), 0);
        assert_eq!(BinWord::from_bits(&[0]).idx(), 1);
        assert_eq!(BinWord::from_bits(&[1]).idx(), 2);
        assert_eq!(BinWord::from_bits(&[0, 0]).idx(), 3);
        assert_eq!(BinWord::from_bits(&[1, 0]).idx(), 4);
        assert_eq!(BinWord::from_bits(&[0, 1]).idx(), 5);
        assert_eq!(BinWord::from_bits(&[1, 1]).idx(), 6);
    }

    #[test]
    fn idx_is_a_bijection_on_first_levels() {
        let mut seen = std::collections::HashSet::new();
        for w in BinWord::up_to(10) {
            let i = w.idx();
            assert!(seen.insert(i), "idx collision at {w}");
            assert_eq!(BinWord::from_idx(i), w);
        }
        // idx of level d spans [2^d - 1, 2^{d+1} - 1) exactly.
        assert_eq!(seen.len(), (1usize << 11) - 1);
        assert_eq!(*seen.iter().max().unwrap(), (1u64 << 11) - 2);
    }

    #[test]
    fn prefix_and_concat_roundtrip() {
        let w = BinWord::parse("011010").unwrap();
        assert_eq!(w.prefix(3), BinWord::parse("011").unwrap());
        assert_eq!(
            w.prefix(3).concat(&BinWord::parse("010").unwrap()),
            w
        );
        assert!(w.prefix(3).is_prefix_of(&w));
        assert!(BinWord::parse("010").unwrap().incomparable(&BinWord::parse("011").unwrap()));
        assert_eq!(w.value(), 0b010110);
        assert_eq!(w.to_string(), "011010");
        assert_eq!(BinWord::parse(&w.to_string()), Some(w));
    }

    #[test]
    fn flip_and_xor() {
        let w = BinWord::parse("0110").unwrap();
        assert_eq!(w.flip_last(), BinWord::parse("0111").unwrap());
        let z = BinWord::parse("1111").unwrap();
        assert_eq!(w.xor(&z), BinWord::parse("1001").unwrap());
    }
}
