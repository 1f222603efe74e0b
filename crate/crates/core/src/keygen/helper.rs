//! Public helper data sent from token to server.
//!
//! Binary layout (all integers big-endian):
//!
//! ```text
//! "PUFH" | version u8 | n u16 | k u16 | t u16 | L u16
//!        | L syndrome blocks, ceil((n-k)/8) bytes each, first bit in MSB
//!        | 16-byte tag
//! ```

use serde::{Deserialize, Serialize};

use super::hash::HASH_BYTES;
use crate::bch::{BchCode, CodeParams, SyndromeBlock};
use crate::error::{Error, Result};

pub const HELPER_MAGIC: &[u8; 4] = b"PUFH";
pub const HELPER_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 4 * 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperData {
    code: CodeParams,
    blocks: Vec<SyndromeBlock>,
    tag: [u8; HASH_BYTES],
}

impl HelperData {
    pub fn new(code: CodeParams, blocks: Vec<SyndromeBlock>, tag: [u8; HASH_BYTES]) -> Result<Self> {
        if blocks.is_empty() || blocks.len() > u16::MAX as usize {
            return Err(Error::param(format!("{} syndrome blocks", blocks.len())));
        }
        if code.n > u16::MAX as usize {
            return Err(Error::param(format!("code length {} does not fit the wire format", code.n)));
        }
        if let Some(b) = blocks.iter().find(|b| b.len() != code.redundancy()) {
            return Err(Error::param(format!("syndrome of {} bits for {code}", b.len())));
        }
        Ok(HelperData { code, blocks, tag })
    }

    pub fn code(&self) -> CodeParams {
        self.code
    }

    pub fn blocks(&self) -> &[SyndromeBlock] {
        &self.blocks
    }

    pub fn tag(&self) -> &[u8; HASH_BYTES] {
        &self.tag
    }

    /// Total public bits: syndromes plus tag.
    pub fn public_bits(&self) -> usize {
        self.syndrome_bits() + 8 * HASH_BYTES
    }

    /// Syndrome bits only, `L * (n - k)`.
    pub fn syndrome_bits(&self) -> usize {
        self.blocks.len() * self.code.redundancy()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.blocks.len() * self.code.redundancy().div_ceil(8) + HASH_BYTES);
        out.extend_from_slice(HELPER_MAGIC);
        out.push(HELPER_VERSION);
        for v in [self.code.n, self.code.k, self.code.t, self.blocks.len()] {
            out.extend_from_slice(&(v as u16).to_be_bytes());
        }
        for b in &self.blocks {
            out.extend_from_slice(&b.to_bytes());
        }
        out.extend_from_slice(&self.tag);
        out
    }

    /// Parses the binary form. The code must be constructible, lengths
    /// must match exactly and block padding bits must be zero.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let proto = |m: String| Error::Protocol(format!("helper data: {m}"));
        if bytes.len() < HEADER_LEN + HASH_BYTES {
            return Err(proto(format!("{} bytes is shorter than the fixed fields", bytes.len())));
        }
        if &bytes[..4] != HELPER_MAGIC {
            return Err(proto("bad magic".into()));
        }
        if bytes[4] != HELPER_VERSION {
            return Err(proto(format!("unsupported version {}", bytes[4])));
        }
        let field = |i: usize| u16::from_be_bytes([bytes[5 + 2 * i], bytes[6 + 2 * i]]) as usize;
        let (n, k, t, blocks) = (field(0), field(1), field(2), field(3));
        let code = CodeParams::new(n, k, t);
        BchCode::from_params(code).map_err(|e| proto(format!("{code}: {e}")))?;
        if blocks == 0 {
            return Err(proto("zero syndrome blocks".into()));
        }
        let block_bytes = code.redundancy().div_ceil(8);
        let expected = HEADER_LEN + blocks * block_bytes + HASH_BYTES;
        if bytes.len() != expected {
            return Err(proto(format!("expected {expected} bytes, got {}", bytes.len())));
        }
        let body = &bytes[HEADER_LEN..HEADER_LEN + blocks * block_bytes];
        let parsed = body
            .chunks(block_bytes)
            .enumerate()
            .map(|(i, c)| SyndromeBlock::from_bytes(c, &code).ok_or_else(|| proto(format!("block {i} has nonzero padding"))))
            .collect::<Result<Vec<_>>>()?;
        let tag: [u8; HASH_BYTES] = bytes[expected - HASH_BYTES..].try_into().expect("tag length");
        HelperData::new(code, parsed, tag).map_err(|e| proto(e.to_string()))
    }

    /// Human-readable form with hex-encoded blocks and tag.
    pub fn to_json(&self) -> String {
        let wire = HelperJson {
            format_version: HELPER_VERSION,
            code: self.code,
            blocks: self.blocks.iter().map(|b| hex(&b.to_bytes())).collect(),
            tag: hex(&self.tag),
        };
        serde_json::to_string_pretty(&wire).expect("helper serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let proto = |m: String| Error::Protocol(format!("helper data: {m}"));
        let wire: HelperJson = serde_json::from_str(text).map_err(|e| proto(e.to_string()))?;
        let mut bytes = HELPER_MAGIC.to_vec();
        bytes.push(wire.format_version);
        for v in [wire.code.n, wire.code.k, wire.code.t, wire.blocks.len()] {
            let v = u16::try_from(v).map_err(|_| proto(format!("field value {v} out of range")))?;
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        for b in wire.blocks.iter().chain(std::iter::once(&wire.tag)) {
            bytes.extend(unhex(b).ok_or_else(|| proto(format!("invalid hex {b:?}")))?);
        }
        Self::from_bytes(&bytes)
    }
}

#[derive(Serialize, Deserialize)]
struct HelperJson {
    format_version: u8,
    code: CodeParams,
    blocks: Vec<String>,
    tag: String,
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn unhex(s: &str) -> Option<Vec<u8>> {
    if s.len() % 2 != 0 || !s.is_ascii() {
        return None;
    }
    (0..s.len()).step_by(2).map(|i| u8::from_str_radix(&s[i..i + 2], 16).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVector;

    fn sample() -> HelperData {
        let code = CodeParams::new(15, 7, 2);
        let blocks = vec![
            SyndromeBlock::new(BitVector::from_bit_str("00010111").unwrap(), &code).unwrap(),
            SyndromeBlock::new(BitVector::from_bit_str("10000000").unwrap(), &code).unwrap(),
        ];
        HelperData::new(code, blocks, [7; 16]).unwrap()
    }

    #[test]
    fn binary_layout() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..5], b"PUFH\x01");
        assert_eq!(&bytes[5..13], &[0, 15, 0, 7, 0, 2, 0, 2]);
        assert_eq!(&bytes[13..15], &[0b1110_1000, 0b0000_0001]);
        assert_eq!(&bytes[15..], &[7; 16]);
        assert_eq!(HelperData::from_bytes(&bytes).unwrap(), sample());
    }

    #[test]
    fn json_round_trip() {
        let h = sample();
        assert_eq!(HelperData::from_json(&h.to_json()).unwrap(), h);
    }

    #[test]
    fn malformed_inputs_are_protocol_errors() {
        let good = sample().to_bytes();
        let mut cases: Vec<Vec<u8>> = vec![good[..good.len() - 1].to_vec(), [good.clone(), vec![0]].concat()];
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        cases.push(bad_magic);
        let mut bad_version = good.clone();
        bad_version[4] = 9;
        cases.push(bad_version);
        let mut bad_code = good.clone();
        bad_code[8] = 8; // k = 8 is not a BCH(15, k, 2) dimension
        cases.push(bad_code);
        for c in cases {
            assert!(matches!(HelperData::from_bytes(&c), Err(Error::Protocol(_))));
        }
    }

    #[test]
    fn hex_helpers() {
        assert_eq!(hex(&[0, 0xab]), "00ab");
        assert_eq!(unhex("00ab"), Some(vec![0, 0xab]));
        assert_eq!(unhex("0g"), None);
        assert_eq!(unhex("abc"), None);
    }
}
