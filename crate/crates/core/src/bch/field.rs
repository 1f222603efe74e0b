//! Arithmetic in GF(2^m) through log/antilog tables.

use crate::error::{Error, Result};

/// Primitive polynomials per extension degree, bit `i` = coefficient of
/// `x^i`. Values follow the standard table in Lin & Costello, "Error
/// Control Coding", Table 2.7.
pub const PRIMITIVE_POLYNOMIALS: [(u32, u32); 8] = [
    (3, 0b1011),         // x^3 + x + 1
    (4, 0b1_0011),       // x^4 + x + 1
    (5, 0b10_0101),      // x^5 + x^2 + 1
    (6, 0b100_0011),     // x^6 + x + 1
    (7, 0b1000_1001),    // x^7 + x^3 + 1
    (8, 0b1_0001_1101),  // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0b10_0001_0001), // x^9 + x^4 + 1
    (10, 0b100_0000_1001), // x^10 + x^3 + 1
];

pub fn primitive_polynomial(m: u32) -> Option<u32> {
    PRIMITIVE_POLYNOMIALS.iter().find(|(d, _)| *d == m).map(|(_, p)| *p)
}

#[derive(Debug, Clone)]
pub struct GaloisField {
    m: u32,
    order: usize,
    primitive: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GaloisField {
    pub fn new(m: u32) -> Result<Self> {
        let primitive =
            primitive_polynomial(m).ok_or_else(|| Error::param(format!("no primitive polynomial for m = {m}")))?;
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut x: u32 = 1;
        for i in 0..order {
            exp[i] = x as u16;
            if i > 0 && x == 1 {
                return Err(Error::param(format!("polynomial {primitive:#x} is not primitive")));
            }
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= primitive;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(GaloisField {
            m,
            order,
            primitive,
            exp,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Multiplicative group order, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn primitive(&self) -> u32 {
        self.primitive
    }

    /// `alpha^i` for any non-negative exponent.
    #[inline]
    pub fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % self.order]
    }

    #[inline]
    pub fn log(&self, a: u16) -> usize {
        debug_assert!(a != 0);
        self.log[a as usize] as usize
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        assert!(b != 0, "division by zero in GF(2^m)");
        if a == 0 {
            0
        } else {
            let la = self.log[a as usize] as usize;
            let lb = self.log[b as usize] as usize;
            self.exp[la + self.order - lb]
        }
    }

    /// Multiplies `a` by `alpha^i`.
    #[inline]
    pub fn mul_alpha_pow(&self, a: u16, i: usize) -> u16 {
        if a == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] as usize + i % self.order) % self.order]
        }
    }
}
