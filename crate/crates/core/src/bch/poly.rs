//! Binary polynomials stored as bit vectors (bit `i` = coefficient of `x^i`).

use crate::bits::BitVector;

use super::field::GaloisField;

/// Degree of a binary polynomial, `None` for the zero polynomial.
pub fn degree(p: &BitVector) -> Option<usize> {
    (0..p.len()).rev().find(|&i| p.get(i))
}

pub fn trim(p: &BitVector) -> BitVector {
    match degree(p) {
        Some(d) => p.slice(0, d + 1),
        None => BitVector::zeros(0),
    }
}

pub fn mul(a: &BitVector, b: &BitVector) -> BitVector {
    if a.is_empty() || b.is_empty() {
        return BitVector::zeros(0);
    }
    let mut out = BitVector::zeros(a.len() + b.len() - 1);
    for i in a.ones_indices() {
        for j in b.ones_indices() {
            out.flip(i + j);
        }
    }
    trim(&out)
}

/// Remainder of `a` divided by `g` (`g` nonzero), as a vector of
/// exactly `deg(g)` bits.
pub fn rem(a: &BitVector, g: &BitVector) -> BitVector {
    let dg = degree(g).expect("division by zero polynomial");
    let mut r = a.clone();
    if r.len() < dg {
        let mut padded = BitVector::zeros(dg);
        for i in r.ones_indices() {
            padded.set(i, true);
        }
        return padded;
    }
    let g_ones = g.ones_indices();
    for i in (dg..r.len()).rev() {
        if r.get(i) {
            let shift = i - dg;
            for &j in &g_ones {
                r.flip(j + shift);
            }
        }
    }
    r.slice(0, dg)
}

/// Minimal polynomial over GF(2) of `alpha^i`: the product of
/// `(x - alpha^j)` over the cyclotomic coset of `i`.
pub fn minimal_polynomial(field: &GaloisField, i: usize) -> BitVector {
    let coset = cyclotomic_coset(field.order(), i);
    // coefficients in GF(2^m), low degree first
    let mut coeffs: Vec<u16> = vec![1];
    for &j in &coset {
        let root = field.alpha_pow(j);
        let mut next = vec![0u16; coeffs.len() + 1];
        for (d, &c) in coeffs.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= field.mul(c, root);
        }
        coeffs = next;
    }
    debug_assert!(coeffs.iter().all(|&c| c <= 1), "minimal polynomial must be binary");
    coeffs.into_iter().map(|c| c == 1).collect()
}

/// Sorted cyclotomic coset `{i, 2i, 4i, ...} mod order`.
pub fn cyclotomic_coset(order: usize, i: usize) -> Vec<usize> {
    let mut coset = Vec::new();
    let mut j = i % order;
    loop {
        coset.push(j);
        j = (2 * j) % order;
        if j == i % order {
            break;
        }
    }
    coset.sort_unstable();
    coset
}
