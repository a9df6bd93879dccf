//! Classical bit strings: keys, parity strings, plaintexts and outcome labels.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An ordered string of bits. Position 0 is the leftmost bit, which is also
/// the leftmost tensor factor and the most significant bit of [`BitString::to_index`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    /// The `len`-bit big-endian encoding of `index`.
    pub fn from_index(index: usize, len: usize) -> Self {
        BitString(
            (0..len)
                .map(|j| (index >> (len - 1 - j)) & 1 == 1)
                .collect(),
        )
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// All `2^len` strings of the given length in lexicographic order.
    pub fn enumerate(len: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << len).map(move |i| BitString::from_index(i, len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> bool {
        self.0[j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// XOR of all bits.
    pub fn parity(&self) -> bool {
        self.0.iter().fold(false, |acc, &b| acc ^ b)
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(BitString(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }
}

impl From<Vec<bool>> for BitString {
    fn from(v: Vec<bool>) -> Self {
        BitString(v)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Shorthand for parsing a literal bit string in tests and examples.
///
/// Panics on characters other than `0` and `1`.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("literal bit string")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for len in 0..6 {
            for i in 0..1usize << len {
                assert_eq!(BitString::from_index(i, len).to_index(), i);
            }
        }
        assert_eq!(BitString::from_index(2, 3).to_string(), "010");
    }

    #[test]
    fn parse_and_display() {
        let b = bits("01101");
        assert_eq!(b.to_string(), "01101");
        assert_eq!(b.weight(), 3);
        assert!(b.parity());
        assert!("0120".parse::<BitString>().is_err());
    }

    #[test]
    fn enumerate_is_lexicographic() {
        let all: Vec<String> = BitString::enumerate(2).map(|b| b.to_string()).collect();
        assert_eq!(all, ["00", "01", "10", "11"]);
    }

    #[test]
    fn xor_length_mismatch() {
        assert!(bits("01").xor(&bits("011")).is_err());
        assert_eq!(bits("0110").xor(&bits("1100")).unwrap(), bits("1010"));
    }
}
