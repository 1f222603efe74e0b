//! Debiasing of raw response bits.

use crate::bits::BitVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvnOutput {
    pub bits: BitVector,
    /// One entry per input pair, set where the pair produced output.
    pub kept_pairs: BitVector,
    /// The input had odd length and its last bit was ignored.
    pub dropped_trailing_bit: bool,
}

/// Classic von Neumann debiasing: `01 -> 0`, `10 -> 1`, `00`/`11` dropped.
pub fn debias_cvn(bits: &BitVector) -> CvnOutput {
    let pairs = bits.len() / 2;
    let mut out = BitVector::zeros(0);
    let mut kept = BitVector::zeros(pairs);
    for i in 0..pairs {
        let (a, b) = (bits.get(2 * i), bits.get(2 * i + 1));
        if a != b {
            out.push(a);
            kept.set(i, true);
        }
    }
    CvnOutput {
        bits: out,
        kept_pairs: kept,
        dropped_trailing_bit: bits.len() % 2 == 1,
    }
}

/// Output of pair-output von Neumann debiasing with erasures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairVnOutput {
    /// Same length as the input; `None` marks an erased position.
    pub symbols: Vec<Option<bool>>,
    pub selection: BitVector,
}

/// Pairs with unequal bits, one selection bit per input pair.
///
/// A pure function of the enrolled bits, so it can be stored once and
/// reused on every reconstruction.
pub fn pair_output_vn_selection(bits: &BitVector) -> BitVector {
    (0..bits.len() / 2).map(|i| bits.get(2 * i) != bits.get(2 * i + 1)).collect()
}

/// Pair-output von Neumann debiasing: unequal pairs emit both bits, equal
/// pairs emit two erasures so positions stay aligned with the input.
pub fn debias_pair_output_vn(bits: &BitVector) -> Result<PairVnOutput> {
    if bits.len() % 2 != 0 {
        return Err(Error::param("pair-output von Neumann debiasing needs an even number of bits"));
    }
    let selection = pair_output_vn_selection(bits);
    let symbols = (0..bits.len())
        .map(|i| selection.get(i / 2).then(|| bits.get(i)))
        .collect();
    Ok(PairVnOutput { symbols, selection })
}

/// Applies a stored pair selection to a (possibly noisy) response:
/// erased pairs, and any unpaired trailing bit, are filled with zeros on
/// both protocol sides so they never contribute errors.
pub fn apply_pair_selection(bits: &BitVector, selection: &BitVector) -> Result<BitVector> {
    if selection.len() != bits.len() / 2 {
        return Err(Error::param(format!(
            "selection covers {} pairs, response has {}",
            selection.len(),
            bits.len() / 2
        )));
    }
    Ok((0..bits.len())
        .map(|i| i / 2 < selection.len() && selection.get(i / 2) && bits.get(i))
        .collect())
}

/// Hamming-weight debiasing: indices of `width`-bit blocks whose weight
/// lies in `[width/2 - delta, width/2 + delta]`. A trailing partial block
/// is never kept.
pub fn debias_hw(bits: &BitVector, width: usize, delta: usize) -> Result<Vec<usize>> {
    if width < 2 {
        return Err(Error::param("block width must be at least 2"));
    }
    if 2 * delta > width {
        return Err(Error::param("delta must not exceed width / 2"));
    }
    let half = width as f64 / 2.0;
    let (lo, hi) = (half - delta as f64, half + delta as f64);
    Ok((0..bits.len() / width)
        .filter(|&b| {
            let w = (0..width).filter(|&j| bits.get(b * width + j)).count() as f64;
            lo <= w && w <= hi
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn bv(s: &str) -> BitVector {
        BitVector::from_bit_str(s).unwrap()
    }

    #[test]
    fn cvn_definition() {
        let out = debias_cvn(&bv("0110"));
        assert_eq!(out.bits, bv("01"));
        assert_eq!(out.kept_pairs, bv("11"));
        assert!(debias_cvn(&bv("0000")).bits.is_empty());
        assert!(debias_cvn(&bv("01011")).dropped_trailing_bit);
    }

    #[test]
    fn pair_vn_emits_pairs_or_erasures() {
        let out = debias_pair_output_vn(&bv("01")).unwrap();
        assert_eq!(out.symbols, vec![Some(false), Some(true)]);
        let out = debias_pair_output_vn(&bv("11")).unwrap();
        assert_eq!(out.symbols, vec![None, None]);
        assert!(debias_pair_output_vn(&bv("011")).is_err());
    }

    #[test]
    fn pair_vn_selection_is_reusable() {
        let mut rng = rng_from_seed(4);
        let bits: BitVector = (0..1000).map(|_| rng.random::<bool>()).collect();
        let a = debias_pair_output_vn(&bits).unwrap().selection;
        let b = debias_pair_output_vn(&bits).unwrap().selection;
        assert_eq!(a, b);
        let filled = apply_pair_selection(&bits, &a).unwrap();
        assert_eq!(filled.len(), bits.len());
    }

    #[test]
    fn hw_selection() {
        assert_eq!(debias_hw(&bv("0101"), 4, 0).unwrap(), vec![0]);
        assert!(debias_hw(&bv("1111"), 4, 0).unwrap().is_empty());
        assert!(debias_hw(&bv("1111"), 1, 0).is_err());
        assert!(debias_hw(&bv("1111"), 4, 3).is_err());
    }

    #[test]
    fn hw_selection_reduces_bias() {
        let mut rng = rng_from_seed(5);
        let bits: BitVector = (0..400_000).map(|_| rng.random::<f64>() < 0.6).collect();
        let kept = debias_hw(&bits, 8, 1).unwrap();
        let ones: usize = kept.iter().map(|&b| (0..8).filter(|&j| bits.get(b * 8 + j)).count()).sum();
        let kept_bias = ones as f64 / (kept.len() * 8) as f64;
        let input_bias = bits.count_ones() as f64 / bits.len() as f64;
        assert!((kept_bias - 0.5).abs() < (input_bias - 0.5).abs());
    }
}
