//! Packed bit strings, the search points of every algorithm in the crate.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A fixed-length bit string stored in 64-bit words, bit `i` at position
/// `i % 64` of word `i / 64`. The number of one-bits is cached and kept in
/// sync by every mutating method.
#[derive(PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
    ones: usize,
}

impl Clone for BitVector {
    fn clone(&self) -> Self {
        BitVector {
            words: self.words.clone(),
            len: self.len,
            ones: self.ones,
        }
    }

    // Reuses the word buffer; offspring pools rely on this.
    fn clone_from(&mut self, source: &Self) {
        self.words.clone_from(&source.words);
        self.len = source.len;
        self.ones = source.ones;
    }
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; len.div_ceil(WORD)],
            len,
            ones: 0,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut words = vec![u64::MAX; len.div_ceil(WORD)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        BitVector {
            words,
            len,
            ones: len,
        }
    }

    /// Uniformly random bit string.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..len.div_ceil(WORD)).map(|_| rng.random()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        BitVector { words, len, ones }
    }

    /// Builds a bit string from raw words; bits beyond `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        assert_eq!(
            words.len(),
            len.div_ceil(WORD),
            "word count does not match length"
        );
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        BitVector { words, len, ones }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.toggle(i);
            }
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of one-bits (the OneMax potential).
    #[inline]
    pub fn ones_count(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn zeros_count(&self) -> usize {
        self.len - self.ones
    }

    #[inline]
    pub fn ones_fraction(&self) -> f64 {
        if self.len == 0 {
            1.0
        } else {
            self.ones as f64 / self.len as f64
        }
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Toggles one bit in place. Panics if `index >= len`.
    #[inline]
    pub fn toggle(&mut self, index: usize) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let word = &mut self.words[index / WORD];
        let mask = 1u64 << (index % WORD);
        *word ^= mask;
        if *word & mask != 0 {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
    }

    /// Toggles every listed position in place. Positions must be distinct;
    /// this is the unchecked hot-loop variant of [`BitVector::flip_bits`].
    #[inline]
    pub fn toggle_all(&mut self, indices: &[usize]) {
        for &i in indices {
            self.toggle(i);
        }
    }

    pub fn set(&mut self, index: usize, value: bool) {
        if self.get(index) != value {
            self.toggle(index);
        }
    }

    /// Returns a copy with exactly the positions in `indices` toggled.
    pub fn flip_bits(&self, indices: &[usize]) -> Result<BitVector> {
        let mut seen = BitVector::zeros(self.len);
        for &i in indices {
            if i >= self.len {
                return Err(Error::OutOfRange {
                    index: i,
                    len: self.len,
                });
            }
            if seen.get(i) {
                return Err(Error::config(format!("duplicate flip position {i}")));
            }
            seen.toggle(i);
        }
        let mut out = self.clone();
        out.toggle_all(indices);
        Ok(out)
    }

    /// Fraction of zero-bits among the positions in `index_set`.
    pub fn density(&self, index_set: &[usize]) -> Result<Density> {
        if index_set.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        let mut zeros = 0;
        for &i in index_set {
            if i >= self.len {
                return Err(Error::OutOfRange {
                    index: i,
                    len: self.len,
                });
            }
            if !self.get(i) {
                zeros += 1;
            }
        }
        Ok(Density {
            zeros,
            size: index_set.len(),
        })
    }

    /// Number of one-bits of `self` inside a word mask of the same length.
    #[inline]
    pub fn ones_in_mask(&self, mask: &[u64]) -> usize {
        debug_assert_eq!(mask.len(), self.words.len());
        self.words
            .iter()
            .zip(mask)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `(s01, s10)`: positions that are zero in `parent` and one in `self`,
    /// and vice versa.
    pub fn transition_counts(&self, parent: &BitVector) -> (usize, usize) {
        debug_assert_eq!(self.len, parent.len);
        let mut s01 = 0;
        let mut s10 = 0;
        for (y, x) in self.words.iter().zip(&parent.words) {
            s01 += (y & !x).count_ones() as usize;
            s10 += (x & !y).count_ones() as usize;
        }
        (s01, s10)
    }

    /// Hamming distance.
    pub fn distance(&self, other: &BitVector) -> usize {
        let (a, b) = self.transition_counts(other);
        a + b
    }

    /// Recounts the one-bits and compares against the cache.
    pub fn check_invariant(&self) -> bool {
        let counted: usize = self.words.iter().map(|w| w.count_ones() as usize).sum();
        let tail_clean = self
            .words
            .last()
            .is_none_or(|w| w & !tail_mask(self.len) == 0);
        counted == self.ones && tail_clean
    }

    /// Bitwise complement.
    pub fn complement(&self) -> BitVector {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(self.len);
        }
        BitVector {
            words,
            len: self.len,
            ones: self.len - self.ones,
        }
    }

    /// Builds a word mask with the given positions set.
    pub fn mask_from_positions(len: usize, positions: &[usize]) -> Vec<u64> {
        let mut mask = vec![0u64; len.div_ceil(WORD)];
        for &p in positions {
            mask[p / WORD] |= 1 << (p % WORD);
        }
        mask
    }
}

fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitVector({self})")
        } else {
            write!(f, "BitVector(len={}, ones={})", self.len, self.ones)
        }
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::config(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitVector::from_bools(&bits))
    }
}

/// Fraction of zero-bits in an index set, kept as an exact ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Density {
    pub zeros: usize,
    pub size: usize,
}

impl Density {
    pub fn value(&self) -> f64 {
        self.zeros as f64 / self.size as f64
    }
}
