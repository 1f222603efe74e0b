use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::GaloisField;
use super::poly;
use crate::bits::BitVector;
use crate::error::{Error, Result};

pub const MIN_M: u32 = 3;
pub const MAX_M: u32 = 10;

/// `(n, k, t)` of a narrow-sense primitive binary BCH code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub t: usize,
}

impl CodeParams {
    pub const fn new(n: usize, k: usize, t: usize) -> Self {
        CodeParams { n, k, t }
    }

    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    /// Blocks needed to collect `key_bits` bits of code dimension.
    pub fn blocks_for(&self, key_bits: usize) -> usize {
        key_bits.div_ceil(self.k)
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BCH({},{},{})", self.n, self.k, self.t)
    }
}

/// The `(n - k)`-bit syndrome of one response block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyndromeBlock(BitVector);

impl SyndromeBlock {
    pub fn new(bits: BitVector, code: &CodeParams) -> Result<Self> {
        if bits.len() != code.redundancy() {
            return Err(Error::param(format!(
                "syndrome of {} bits, {code} needs {}",
                bits.len(),
                code.redundancy()
            )));
        }
        Ok(SyndromeBlock(bits))
    }

    pub fn bits(&self) -> &BitVector {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Serialized form: most significant coefficient first, zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.to_bytes_msb_first()
    }

    pub fn from_bytes(bytes: &[u8], code: &CodeParams) -> Option<Self> {
        BitVector::from_bytes_msb_first(bytes, code.redundancy()).map(SyndromeBlock)
    }
}

#[derive(Clone)]
pub struct BchCode {
    params: CodeParams,
    m: u32,
    generator: BitVector,
    field: GaloisField,
}

impl fmt::Debug for BchCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BchCode")
            .field("params", &self.params)
            .field("m", &self.m)
            .field("primitive_poly", &format_args!("{:#x}", self.field.primitive()))
            .finish()
    }
}

/// Extension degree `m` with `n = 2^m - 1`, if any.
pub fn extension_degree(n: usize) -> Option<u32> {
    let m = (n + 1).trailing_zeros();
    ((n + 1).is_power_of_two() && n > 0).then_some(m)
}

/// Generator polynomial of the narrow-sense code of length `2^m - 1`
/// with designed distance `2t + 1`: the LCM of the minimal polynomials
/// of `alpha, alpha^2, ..., alpha^(2t)`.
pub fn generator_polynomial(field: &GaloisField, t: usize) -> BitVector {
    let order = field.order();
    let mut covered = vec![false; order];
    let mut g = BitVector::from_bools([true]);
    for i in 1..=2 * t {
        let i = i % order;
        if covered[i] {
            continue;
        }
        for j in poly::cyclotomic_coset(order, i) {
            covered[j] = true;
        }
        g = poly::mul(&g, &poly::minimal_polynomial(field, i));
    }
    g
}

/// Code dimension for `(m, t)` from cyclotomic coset sizes alone.
pub fn dimension_for(m: u32, t: usize) -> usize {
    let order = (1usize << m) - 1;
    let mut covered = vec![false; order];
    for i in 1..=2 * t {
        for j in poly::cyclotomic_coset(order, i % order) {
            covered[j] = true;
        }
    }
    order - covered.iter().filter(|&&c| c).count()
}

impl BchCode {
    /// Constructs BCH(n, k, t); fails unless the generator built for `t`
    /// has degree exactly `n - k`.
    pub fn new(n: usize, k: usize, t: usize) -> Result<Self> {
        let m = extension_degree(n).ok_or_else(|| Error::param(format!("n = {n} is not 2^m - 1")))?;
        if !(MIN_M..=MAX_M).contains(&m) {
            return Err(Error::param(format!("m = {m} outside [{MIN_M}, {MAX_M}]")));
        }
        if t == 0 || k == 0 || k >= n || 2 * t >= n {
            return Err(Error::param(format!("BCH({n},{k},{t}) out of range")));
        }
        let field = GaloisField::new(m)?;
        let generator = generator_polynomial(&field, t);
        let deg = poly::degree(&generator).unwrap_or(0);
        if deg != n - k {
            return Err(Error::param(format!(
                "BCH({n},{k},{t}) inconsistent: generator for t = {t} has degree {deg}, not n - k = {}",
                n - k
            )));
        }
        Ok(BchCode {
            params: CodeParams { n, k, t },
            m,
            generator,
            field,
        })
    }

    pub fn from_params(p: CodeParams) -> Result<Self> {
        Self::new(p.n, p.k, p.t)
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn t(&self) -> usize {
        self.params.t
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Generator polynomial, `n - k + 1` coefficients, low degree first.
    pub fn generator(&self) -> &BitVector {
        &self.generator
    }

    pub fn primitive_polynomial(&self) -> u32 {
        self.field.primitive()
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    /// Helper data of one block: `r(x) mod g(x)`.
    ///
    /// The map is linear and its kernel is exactly the code, so it is a
    /// syndrome for a parity-check matrix whose row space is the dual
    /// code.
    pub fn gen_syndrome(&self, block: &BitVector) -> Result<SyndromeBlock> {
        if block.len() != self.params.n {
            return Err(Error::param(format!(
                "block of {} bits, {} needs {}",
                block.len(),
                self.params,
                self.params.n
            )));
        }
        Ok(SyndromeBlock(poly::rem(block, &self.generator)))
    }

    /// Non-systematic encoding `c(x) = msg(x) * g(x)`.
    pub fn encode(&self, message: &BitVector) -> Result<BitVector> {
        if message.len() != self.params.k {
            return Err(Error::param(format!("message must have {} bits", self.params.k)));
        }
        let product = poly::mul(message, &self.generator);
        let mut c = BitVector::zeros(self.params.n);
        for i in product.ones_indices() {
            c.set(i, true);
        }
        Ok(c)
    }

    pub fn is_codeword(&self, word: &BitVector) -> bool {
        word.len() == self.params.n && poly::rem(word, &self.generator).count_ones() == 0
    }
}
