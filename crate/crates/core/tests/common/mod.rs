//! Independent reference computations used by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Straightforward BLAKE2s following RFC 7693, unkeyed, any output length
/// from 1 to 32 bytes.
pub fn blake2s_reference(data: &[u8], outlen: usize) -> Vec<u8> {
    const IV: [u32; 8] = [
        0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A, 0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19,
    ];
    const SIGMA: [[usize; 16]; 10] = [
        [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
        [14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3],
        [11, 8, 12, 0, 5, 2, 15, 13, 10, 14, 3, 6, 7, 1, 9, 4],
        [7, 9, 3, 1, 13, 12, 11, 14, 2, 6, 5, 10, 4, 0, 15, 8],
        [9, 0, 5, 7, 2, 4, 10, 15, 14, 1, 11, 12, 6, 8, 3, 13],
        [2, 12, 6, 10, 0, 11, 8, 3, 4, 13, 7, 5, 15, 14, 1, 9],
        [12, 5, 1, 15, 14, 13, 4, 10, 0, 7, 6, 3, 9, 2, 8, 11],
        [13, 11, 7, 14, 12, 1, 3, 9, 5, 0, 15, 4, 8, 6, 2, 10],
        [6, 15, 14, 9, 11, 3, 0, 8, 12, 2, 13, 7, 1, 4, 10, 5],
        [10, 2, 8, 4, 7, 6, 1, 5, 15, 11, 9, 14, 3, 12, 13, 0],
    ];
    assert!((1..=32).contains(&outlen));

    fn g(v: &mut [u32; 16], a: usize, b: usize, c: usize, d: usize, x: u32, y: u32) {
        v[a] = v[a].wrapping_add(v[b]).wrapping_add(x);
        v[d] = (v[d] ^ v[a]).rotate_right(16);
        v[c] = v[c].wrapping_add(v[d]);
        v[b] = (v[b] ^ v[c]).rotate_right(12);
        v[a] = v[a].wrapping_add(v[b]).wrapping_add(y);
        v[d] = (v[d] ^ v[a]).rotate_right(8);
        v[c] = v[c].wrapping_add(v[d]);
        v[b] = (v[b] ^ v[c]).rotate_right(7);
    }

    let compress = |h: &mut [u32; 8], block: &[u8; 64], counter: u64, last: bool| {
        let m: Vec<u32> = block.chunks(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        let mut v = [0u32; 16];
        v[..8].copy_from_slice(h);
        v[8..].copy_from_slice(&IV);
        v[12] ^= counter as u32;
        v[13] ^= (counter >> 32) as u32;
        if last {
            v[14] = !v[14];
        }
        for s in SIGMA.iter() {
            g(&mut v, 0, 4, 8, 12, m[s[0]], m[s[1]]);
            g(&mut v, 1, 5, 9, 13, m[s[2]], m[s[3]]);
            g(&mut v, 2, 6, 10, 14, m[s[4]], m[s[5]]);
            g(&mut v, 3, 7, 11, 15, m[s[6]], m[s[7]]);
            g(&mut v, 0, 5, 10, 15, m[s[8]], m[s[9]]);
            g(&mut v, 1, 6, 11, 12, m[s[10]], m[s[11]]);
            g(&mut v, 2, 7, 8, 13, m[s[12]], m[s[13]]);
            g(&mut v, 3, 4, 9, 14, m[s[14]], m[s[15]]);
        }
        for i in 0..8 {
            h[i] ^= v[i] ^ v[i + 8];
        }
    };

    let mut h = IV;
    h[0] ^= 0x0101_0000 ^ outlen as u32;
    let blocks = data.len().div_ceil(64).max(1);
    for b in 0..blocks {
        let start = b * 64;
        let end = (start + 64).min(data.len());
        let mut block = [0u8; 64];
        block[..end - start].copy_from_slice(&data[start..end]);
        let last = b + 1 == blocks;
        compress(&mut h, &block, end as u64, last);
    }
    h.iter().flat_map(|w| w.to_le_bytes()).take(outlen).collect()
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Exact `P(X > t)` for `X ~ Binomial(n, ber)`, with `ber` taken as the
/// exact binary value of the float.
pub fn binomial_tail_exact(n: usize, t: usize, ber: f64) -> f64 {
    let p = BigRational::from_float(ber).expect("finite ber");
    let q = BigRational::one() - &p;
    let mut total = BigRational::zero();
    let mut choose = BigInt::one();
    for i in 0..=n {
        if i > t {
            total += BigRational::from_integer(choose.clone()) * num_traits::pow(p.clone(), i) * num_traits::pow(q.clone(), n - i);
        }
        choose = choose * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    total.to_f64().expect("representable")
}

/// Carry-less product of two GF(2) polynomials given as bit masks
/// (bit `i` = coefficient of `x^i`).
pub fn gf2_mul(a: u128, b: u128) -> u128 {
    let mut out = 0u128;
    for i in 0..128 {
        if (b >> i) & 1 == 1 {
            out ^= a << i;
        }
    }
    out
}

/// Remainder of GF(2) polynomial division.
pub fn gf2_rem(mut a: u128, g: u128) -> u128 {
    let dg = 127 - g.leading_zeros();
    while a != 0 && 127 - a.leading_zeros() >= dg {
        a ^= g << (127 - a.leading_zeros() - dg);
    }
    a
}

/// Minimum Hamming weight over all nonzero multiples `m(x) * g(x)` with
/// `deg m < k`.
pub fn min_weight(g: u128, k: usize) -> u32 {
    (1u128..1 << k).map(|m| gf2_mul(m, g).count_ones()).min().unwrap()
}

pub fn bits_to_mask(bits: &pufkit_core::BitVector) -> u128 {
    bits.iter().enumerate().fold(0, |acc, (i, b)| acc | ((b as u128) << i))
}

pub fn mask_to_bits(mask: u128, len: usize) -> pufkit_core::BitVector {
    (0..len).map(|i| (mask >> i) & 1 == 1).collect()
}
