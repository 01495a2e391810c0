//! Enumerative source coding of binary sequences.
//!
//! Sequences of length `k ≤ 63` are packed into a `u64` with the first symbol
//! in the most significant of the `k` low bits, so that integer order equals
//! lexicographic order. The index lists all sequences by Hamming weight first
//! and lexicographic rank second.

use crate::error::{Error, Result};

/// Largest supported source length.
pub const MAX_SOURCE_LEN: usize = 63;

/// Pack a 0/1 vector (first symbol first) into a word.
pub fn pack(v: &[u8]) -> Result<u64> {
    if v.len() > MAX_SOURCE_LEN {
        return Err(Error::InvalidCodec(format!(
            "source length {} exceeds {MAX_SOURCE_LEN}",
            v.len()
        )));
    }
    v.iter().try_fold(0u64, |acc, &b| match b {
        0 | 1 => Ok((acc << 1) | b as u64),
        _ => Err(Error::InvalidCodec(format!("symbol {b} is not binary"))),
    })
}

/// Inverse of [`pack`].
pub fn unpack(word: u64, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((word >> (k - 1 - i)) & 1) as u8).collect()
}

/// `L = ⌈log2(I + 1)⌉`, the bit length of the index.
pub fn codeword_length(index: u64) -> u32 {
    u64::BITS - index.leading_zeros()
}

/// Weight-then-lexicographic ranking of length-`k` binary sequences.
#[derive(Debug, Clone)]
pub struct Enumerator {
    k: usize,
    /// `binom[m][j] = C(m, j)` for `m ≤ k`.
    binom: Vec<Vec<u64>>,
    /// `offsets[w] = Σ_{w' < w} C(k, w')`.
    offsets: Vec<u64>,
}

impl Enumerator {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_SOURCE_LEN {
            return Err(Error::InvalidCodec(format!(
                "source length must be in 1..={MAX_SOURCE_LEN}, got {k}"
            )));
        }
        let mut binom = vec![vec![0u64; k + 1]; k + 1];
        for m in 0..=k {
            binom[m][0] = 1;
            for j in 1..=m {
                binom[m][j] = binom[m - 1][j - 1] + if j < m { binom[m - 1][j] } else { 0 };
            }
        }
        let mut offsets = Vec::with_capacity(k + 2);
        let mut acc = 0u64;
        for w in 0..=k {
            offsets.push(acc);
            acc += binom[k][w];
        }
        offsets.push(acc);
        Ok(Enumerator { k, binom, offsets })
    }

    pub fn len(&self) -> usize {
        self.k
    }

    /// Number of sequences, `2^k`.
    pub fn count(&self) -> u64 {
        self.offsets[self.k + 1]
    }

    /// Index of weight class `w`'s first member.
    pub fn weight_offset(&self, w: usize) -> u64 {
        self.offsets[w]
    }

    fn c(&self, m: usize, j: usize) -> u64 {
        if j > m {
            0
        } else {
            self.binom[m][j]
        }
    }

    /// Index of a packed sequence.
    pub fn index(&self, word: u64) -> u64 {
        let w = word.count_ones() as usize;
        let mut rank = 0u64;
        let mut left = w;
        for i in 0..self.k {
            if left == 0 {
                break;
            }
            if (word >> (self.k - 1 - i)) & 1 == 1 {
                // every sequence with a 0 here and the same prefix comes first
                rank += self.c(self.k - 1 - i, left);
                left -= 1;
            }
        }
        self.offsets[w] + rank
    }

    /// Packed sequence with the given index.
    pub fn invert(&self, index: u64) -> Result<u64> {
        if index >= self.count() {
            return Err(Error::InvalidCodec(format!("index {index} is not below 2^{}", self.k)));
        }
        let w = self.offsets.partition_point(|&o| o <= index) - 1;
        let mut rank = index - self.offsets[w];
        let mut left = w;
        let mut word = 0u64;
        for i in 0..self.k {
            if left == 0 {
                break;
            }
            let rest = self.k - 1 - i;
            let zeros_first = self.c(rest, left);
            if rank >= zeros_first {
                rank -= zeros_first;
                word |= 1 << rest;
                left -= 1;
            }
        }
        Ok(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        let e = Enumerator::new(4).unwrap();
        assert_eq!(e.index(0), 0);
        assert_eq!(codeword_length(e.index(0)), 0);
        assert_eq!(e.index(pack(&[0, 0, 0, 1]).unwrap()), 1);
        assert_eq!(e.invert(15).unwrap(), pack(&[1, 1, 1, 1]).unwrap());
        assert_eq!(e.invert(0).unwrap(), 0);
        assert!(e.invert(16).is_err());
    }

    #[test]
    fn matches_sorted_enumeration() {
        // oracle: sort all sequences by (weight, lexicographic order)
        for k in [1, 4, 8, 12] {
            let e = Enumerator::new(k).unwrap();
            let mut all: Vec<Vec<u8>> = (0..1u64 << k).map(|w| unpack(w, k)).collect();
            all.sort_by(|a, b| {
                let wa: u32 = a.iter().map(|&x| x as u32).sum();
                let wb: u32 = b.iter().map(|&x| x as u32).sum();
                wa.cmp(&wb).then_with(|| a.cmp(b))
            });
            for (i, v) in all.iter().enumerate() {
                let word = pack(v).unwrap();
                assert_eq!(e.index(word), i as u64);
                assert_eq!(e.invert(i as u64).unwrap(), word);
            }
        }
    }

    #[test]
    fn round_trip_is_exhaustive_at_16() {
        let e = Enumerator::new(16).unwrap();
        let mut seen = vec![false; 1 << 16];
        for word in 0..1u64 << 16 {
            let i = e.index(word);
            assert!(!seen[i as usize]);
            seen[i as usize] = true;
            assert_eq!(e.invert(i).unwrap(), word);
        }
    }

    #[test]
    fn length_grows_with_weight() {
        let e = Enumerator::new(10).unwrap();
        let mut prev = 0;
        for w in 0..=10 {
            let first = e.weight_offset(w);
            assert!(first >= prev);
            prev = first;
            assert_eq!(e.invert(first).unwrap().count_ones() as usize, w);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(pack(&[0, 2]).is_err());
        assert!(Enumerator::new(0).is_err());
        assert!(Enumerator::new(64).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_large_k(word in any::<u64>(), k in 20usize..=63) {
            let e = Enumerator::new(k).unwrap();
            let word = word & ((1u64 << k) - 1);
            let i = e.index(word);
            prop_assert!(i < e.count());
            prop_assert_eq!(e.invert(i).unwrap(), word);
            prop_assert_eq!(unpack(word, k), unpack(pack(&unpack(word, k)).unwrap(), k));
        }
    }
}
