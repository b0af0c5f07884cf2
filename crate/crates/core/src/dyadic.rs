//! Finite binary words and their cylinder intervals.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A binary word `w_1 ... w_n`. Its cylinder is `[m 2^-n, (m+1) 2^-n]` where
/// `m` is the word read as a binary integer, most significant digit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DyadicWord {
    bits: Vec<u8>,
}

impl DyadicWord {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("word letters must be 0 or 1".into()));
        }
        Ok(DyadicWord { bits })
    }

    pub fn empty() -> Self {
        DyadicWord { bits: Vec::new() }
    }

    /// The length-`n` word with integer value `m`.
    pub fn from_index(m: u64, n: u32) -> Self {
        assert!(
            n <= 64 && (n == 64 || m < 1u64 << n),
            "index {m} out of range for length {n}"
        );
        let bits = (0..n).rev().map(|i| ((m >> i) & 1) as u8).collect();
        DyadicWord { bits }
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

    /// Integer value `m`, when it fits.
    pub fn index(&self) -> Option<u64> {
        (self.len() <= 64).then(|| self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    /// Left endpoint as the exact pair `(m, n)` meaning `m 2^-n`.
    pub fn left(&self) -> (u64, u32) {
        (
            self.index().expect("word longer than 64 letters"),
            self.len() as u32,
        )
    }

    /// Right endpoint as the exact pair `(m + 1, n)`.
    pub fn right(&self) -> (u64, u32) {
        let (m, n) = self.left();
        (m + 1, n)
    }

    pub fn interval(&self) -> (f64, f64) {
        let (m, n) = self.left();
        let scale = (n as f64).exp2();
        (m as f64 / scale, (m + 1) as f64 / scale)
    }

    /// Drops the first letter; the doubling map sends the cylinder onto the
    /// cylinder of the shifted word.
    pub fn shift(&self) -> DyadicWord {
        DyadicWord {
            bits: self.bits.get(1..).unwrap_or(&[]).to_vec(),
        }
    }

    /// Letters `start..len` (zero based).
    pub fn suffix(&self, start: usize) -> DyadicWord {
        DyadicWord {
            bits: self.bits[start..].to_vec(),
        }
    }

    pub fn concat(&self, other: &DyadicWord) -> DyadicWord {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        DyadicWord { bits }
    }

    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1);
        self.bits.push(bit);
    }
}

impl fmt::Display for DyadicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for DyadicWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidArgument(format!("not a binary word: {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(DyadicWord { bits })
    }
}

/// The depth-`n` cylinder containing `x` (reduced mod 1). A dyadic point
/// belongs to the cylinder it is the left endpoint of.
pub fn cylinder_of(x: f64, n: u32) -> DyadicWord {
    assert!(n <= 63, "depth {n} too large");
    let x = x.rem_euclid(1.0);
    let m = (x * (n as f64).exp2()).floor() as u64;
    DyadicWord::from_index(m.min((1u64 << n) - 1), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cylinder_examples() {
        assert_eq!(cylinder_of(0.3, 2).to_string(), "01");
        assert_eq!(cylinder_of(0.5, 1).to_string(), "1");
        assert_eq!(cylinder_of(0.0, 3).to_string(), "000");
        assert_eq!(cylinder_of(0.3, 2).interval(), (0.25, 0.5));
    }

    #[test]
    fn parse_and_index() {
        let w: DyadicWord = "0110".parse().unwrap();
        assert_eq!(w.index(), Some(6));
        assert_eq!(DyadicWord::from_index(6, 4), w);
        assert!("012".parse::<DyadicWord>().is_err());
        assert_eq!(DyadicWord::empty().interval(), (0.0, 1.0));
    }

    proptest! {
        #[test]
        fn shift_is_doubling(m in 0u64..(1 << 20), n in 1u32..=20) {
            let m = m % (1u64 << n);
            let w = DyadicWord::from_index(m, n);
            let (a, b) = w.left();
            // T maps [m/2^n, (m+1)/2^n] onto [2m mod 2^n, ...]/2^n
            let image_left = (2 * a) % (1u64 << b);
            let s = w.shift();
            prop_assert_eq!(s.left(), (image_left >> 1, b - 1));
            prop_assert_eq!(w.right().0 - w.left().0, 1);
        }

        #[test]
        fn cylinder_contains_point(x in 0.0..1.0f64, n in 0u32..=30) {
            let (a, b) = cylinder_of(x, n).interval();
            prop_assert!(a <= x && x < b);
        }
    }
}
