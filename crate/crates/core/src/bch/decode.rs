//! Syndrome decoding: power-sum syndromes, Berlekamp-Massey for the
//! error locator, and an exhaustive Chien search for its roots.

use serde::{Deserialize, Serialize};

use super::code::{BchCode, SyndromeBlock};
use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Why a block could not be decoded. More than `t` errors were present;
/// patterns beyond `t` can also miscorrect silently, which only the
/// protocol-level tag detects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeFailure {
    /// Locator degree exceeds `t`.
    LocatorTooLong,
    /// The locator does not split into distinct roots inside the code length.
    RootCountMismatch,
    /// The corrected word does not reproduce the helper syndrome.
    SyndromeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Corrected { word: BitVector, errors: usize },
    Failed(DecodeFailure),
}

impl DecodeOutcome {
    pub fn word(self) -> Option<BitVector> {
        match self {
            DecodeOutcome::Corrected { word, .. } => Some(word),
            DecodeOutcome::Failed(_) => None,
        }
    }

    pub fn is_corrected(&self) -> bool {
        matches!(self, DecodeOutcome::Corrected { .. })
    }
}

impl BchCode {
    /// Recovers the block `r` with `gen_syndrome(r) == helper` closest to
    /// `r_prime`, provided the two differ in at most `t` positions.
    pub fn decode_syndrome(&self, r_prime: &BitVector, helper: &SyndromeBlock) -> Result<DecodeOutcome> {
        let params = self.params();
        if helper.len() != params.redundancy() {
            return Err(Error::param(format!(
                "helper block of {} bits, {params} needs {}",
                helper.len(),
                params.redundancy()
            )));
        }
        let mut s = self.gen_syndrome(r_prime)?.bits().clone();
        s ^= helper.bits();
        if s.count_ones() == 0 {
            return Ok(DecodeOutcome::Corrected {
                word: r_prime.clone(),
                errors: 0,
            });
        }

        let syndromes = self.power_sums(&s);
        let locator = self.berlekamp_massey(&syndromes);
        let nu = locator.len() - 1;
        if nu > params.t {
            return Ok(DecodeOutcome::Failed(DecodeFailure::LocatorTooLong));
        }
        let positions = self.chien_search(&locator);
        if positions.len() != nu {
            return Ok(DecodeOutcome::Failed(DecodeFailure::RootCountMismatch));
        }
        let mut word = r_prime.clone();
        for &i in &positions {
            word.flip(i);
        }
        if self.gen_syndrome(&word)?.bits() != helper.bits() {
            return Ok(DecodeOutcome::Failed(DecodeFailure::SyndromeMismatch));
        }
        Ok(DecodeOutcome::Corrected {
            word,
            errors: positions.len(),
        })
    }

    /// `S_j = s(alpha^j)` for `j = 1..=2t`; index 0 holds `S_1`.
    ///
    /// Because `s = e mod g` and `g(alpha^j) = 0` over this range, these
    /// equal the power sums of the error pattern.
    fn power_sums(&self, s: &BitVector) -> Vec<u16> {
        let f = self.field();
        let two_t = 2 * self.t();
        let ones = s.ones_indices();
        let mut out = vec![0u16; two_t];
        for j in 1..=two_t {
            out[j - 1] = if j % 2 == 0 {
                let h = out[j / 2 - 1];
                f.mul(h, h)
            } else {
                ones.iter().fold(0u16, |acc, &i| acc ^ f.alpha_pow(i * j))
            };
        }
        out
    }

    /// Shortest LFSR generating the syndrome sequence; returns the
    /// locator coefficients `[1, l_1, ..., l_nu]` trimmed to its length.
    fn berlekamp_massey(&self, s: &[u16]) -> Vec<u16> {
        let f = self.field();
        let cap = s.len() + 1;
        let mut c = vec![0u16; cap];
        let mut b = vec![0u16; cap];
        c[0] = 1;
        b[0] = 1;
        let mut l = 0usize;
        let mut shift = 1usize;
        let mut last_d = 1u16;
        for n in 0..s.len() {
            let mut d = s[n];
            for i in 1..=l {
                d ^= f.mul(c[i], s[n - i]);
            }
            if d == 0 {
                shift += 1;
                continue;
            }
            let coef = f.div(d, last_d);
            if 2 * l <= n {
                let prev = c.clone();
                for i in 0..cap - shift {
                    c[i + shift] ^= f.mul(coef, b[i]);
                }
                l = n + 1 - l;
                b = prev;
                last_d = d;
                shift = 1;
            } else {
                for i in 0..cap - shift {
                    c[i + shift] ^= f.mul(coef, b[i]);
                }
                shift += 1;
            }
        }
        // a locator whose true degree is below l leaves trailing zeros;
        // keeping length l + 1 makes the root count check reject it
        c.truncate(l + 1);
        c
    }

    /// Error positions `i` with `locator(alpha^-i) = 0`, over every
    /// position of the code.
    fn chien_search(&self, locator: &[u16]) -> Vec<usize> {
        let f = self.field();
        let n = self.n();
        let order = f.order();
        let mut terms: Vec<u16> = locator.to_vec();
        let mut out = Vec::with_capacity(locator.len() - 1);
        // position 0 evaluates at alpha^0
        for i in 0..n {
            let sum = terms.iter().fold(0u16, |acc, &t| acc ^ t);
            if sum == 0 {
                out.push(i);
            }
            // advance every term j by alpha^-j
            for (j, t) in terms.iter_mut().enumerate().skip(1) {
                *t = f.mul_alpha_pow(*t, order - j % order);
            }
        }
        out
    }
}
