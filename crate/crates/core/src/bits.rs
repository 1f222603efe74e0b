//! Packed bit vectors used for responses, references and syndromes.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

const WORD: usize = 64;

/// A fixed-length vector of bits packed into 64-bit words.
///
/// Bits beyond `len` in the final word are always zero, so equality and
/// population counts can operate on whole words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            words: vec![u64::MAX; len.div_ceil(WORD)],
            len,
        };
        v.clear_tail();
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        BitVector { words, len }
    }

    /// Parses a string of `0`/`1` characters, first character is bit 0.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        let mut out = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return None,
            }
        }
        Some(Self::from_bools(out))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions where `self` and `other` differ.
    ///
    /// Panics if the lengths differ.
    pub fn hamming_distance(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len, "hamming distance of unequal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of set bits, ascending.
    pub fn ones_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count_ones());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let tz = w.trailing_zeros() as usize;
                out.push(wi * WORD + tz);
                w &= w - 1;
            }
        }
        out
    }

    /// Gathers the bits at `indices`, in the order given.
    pub fn select(&self, indices: &[u32]) -> BitVector {
        let mut out = BitVector::zeros(indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if self.get(i as usize) {
                out.words[j / WORD] |= 1 << (j % WORD);
            }
        }
        out
    }

    /// Copies `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVector::zeros(len);
        for j in 0..len {
            if self.get(start + j) {
                out.words[j / WORD] |= 1 << (j % WORD);
            }
        }
        out
    }

    /// Appends all bits of `other`.
    pub fn extend_from(&mut self, other: &BitVector) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn push(&mut self, b: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        if b {
            self.words[self.len / WORD] |= 1 << (self.len % WORD);
        }
        self.len += 1;
    }

    /// Packs bits least-significant-bit first, zero padded to a byte boundary.
    pub fn to_bytes_lsb(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for i in 0..nbytes {
            out.push((self.words[i / 8] >> ((i % 8) * 8)) as u8);
        }
        out
    }

    /// Inverse of [`to_bytes_lsb`](Self::to_bytes_lsb). Returns `None` when
    /// `bytes` has the wrong length or nonzero padding bits.
    pub fn from_bytes_lsb(bytes: &[u8], len: usize) -> Option<BitVector> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut v = BitVector::zeros(len);
        for (i, &byte) in bytes.iter().enumerate() {
            v.words[i / 8] |= (byte as u64) << ((i % 8) * 8);
        }
        let before = v.words.last().copied();
        v.clear_tail();
        if v.words.last().copied() != before {
            return None;
        }
        Some(v)
    }

    /// Packs bits with bit `len - 1` first (most significant bit of the
    /// first byte), zero padded at the end.
    pub fn to_bytes_msb_first(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for j in 0..self.len {
            if self.get(self.len - 1 - j) {
                out[j / 8] |= 0x80 >> (j % 8);
            }
        }
        out
    }

    /// Inverse of [`to_bytes_msb_first`](Self::to_bytes_msb_first).
    pub fn from_bytes_msb_first(bytes: &[u8], len: usize) -> Option<BitVector> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut v = BitVector::zeros(len);
        for j in 0..bytes.len() * 8 {
            let bit = bytes[j / 8] & (0x80 >> (j % 8)) != 0;
            if j < len {
                v.set(len - 1 - j, bit);
            } else if bit {
                return None;
            }
        }
        Some(v)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({}; ", self.len)?;
        for b in self.iter().take(128) {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.len > 128 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitVector::from_bools(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lsb_packing_matches_layout() {
        let v = BitVector::from_bit_str("1000000001").unwrap();
        assert_eq!(v.to_bytes_lsb(), vec![0x01, 0x02]);
    }

    #[test]
    fn msb_first_packing_puts_high_coefficient_first() {
        // bit 9 (highest) set, bit 0 set
        let v = BitVector::from_bit_str("1000000001").unwrap();
        assert_eq!(v.to_bytes_msb_first(), vec![0x80, 0x40]);
    }

    #[test]
    fn nonzero_padding_rejected() {
        assert!(BitVector::from_bytes_lsb(&[0xff], 4).is_none());
        assert!(BitVector::from_bytes_msb_first(&[0xff], 4).is_none());
        assert!(BitVector::from_bytes_lsb(&[0x0f], 4).is_some());
    }

    #[test]
    fn ones_and_select() {
        let v = BitVector::ones(70);
        assert_eq!(v.count_ones(), 70);
        let s = BitVector::from_bit_str("0110").unwrap();
        assert_eq!(s.ones_indices(), vec![1, 2]);
        assert_eq!(s.select(&[2, 0, 1]), BitVector::from_bit_str("101").unwrap());
    }

    proptest! {
        #[test]
        fn byte_packings_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..300)) {
            let v = BitVector::from_bools(bits.iter().copied());
            prop_assert_eq!(BitVector::from_bytes_lsb(&v.to_bytes_lsb(), v.len()).unwrap(), v.clone());
            prop_assert_eq!(BitVector::from_bytes_msb_first(&v.to_bytes_msb_first(), v.len()).unwrap(), v);
        }

        #[test]
        fn hamming_is_weight_of_xor(a in proptest::collection::vec(any::<bool>(), 100),
                                    b in proptest::collection::vec(any::<bool>(), 100)) {
            let va = BitVector::from_bools(a);
            let vb = BitVector::from_bools(b);
            prop_assert_eq!(va.hamming_distance(&vb), (&va ^ &vb).count_ones());
        }
    }
}
