//! Reverse fuzzy extractor with multiple references, plus the classic
//! fuzzy extractor as a baseline.
//!
//! The token holds the noisy response `r'`, computes one syndrome per
//! `n`-bit block and derives the key from `r'` itself. The server, which
//! holds the enrolled references, decodes each reference towards `r'` and
//! accepts the first candidate whose tag matches.

use std::fmt;

use super::hash::{hash128, HASH_BYTES};
use super::helper::{hex, HelperData};
use crate::analytics::debias::apply_pair_selection;
use crate::bch::{BchCode, CodeParams, DecodeOutcome, SyndromeBlock};
use crate::bits::BitVector;
use crate::enrollment::{Challenge, EnrollmentRecord};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey([u8; HASH_BYTES]);

impl SecretKey {
    pub fn from_bytes(bytes: [u8; HASH_BYTES]) -> Self {
        SecretKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; HASH_BYTES] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex(&self.0)
    }

    /// Short public identifier, safe to log.
    pub fn fingerprint(&self) -> String {
        hex(&hash128(&self.0)[..8])
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SecretKey(fp={})", self.fingerprint())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenOutput {
    pub helper: HelperData,
    pub key: SecretKey,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryResult {
    /// `None` when no reference reproduced the tag.
    pub key: Option<SecretKey>,
    /// Index into the record's references of the accepted one.
    pub reference_index: Option<usize>,
    /// References tried, including the accepted one.
    pub attempts: usize,
}

impl RecoveryResult {
    pub fn is_success(&self) -> bool {
        self.key.is_some()
    }
}

/// Order in which the server tries references.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum AttemptOrder {
    #[default]
    Enrollment,
    /// Closest enrollment temperature first; ties keep enrollment order.
    NearestTo(f64),
}

/// Response bits the protocol consumes: `L * n`.
pub fn response_bits_needed(code: CodeParams, key_bits: usize) -> usize {
    code.blocks_for(key_bits) * code.n
}

fn key_from_response(used: &BitVector) -> SecretKey {
    SecretKey(hash128(&used.to_bytes_lsb()))
}

/// Tag input: key, code parameters, block count and every syndrome block
/// as a 16-bit bit length followed by its bytes.
pub fn tag_input(key: &SecretKey, code: CodeParams, blocks: &[SyndromeBlock]) -> Vec<u8> {
    let mut data = key.as_bytes().to_vec();
    for v in [code.n, code.k, code.t, blocks.len()] {
        data.extend_from_slice(&(v as u16).to_be_bytes());
    }
    for b in blocks {
        data.extend_from_slice(&(b.len() as u16).to_be_bytes());
        data.extend_from_slice(&b.to_bytes());
    }
    data
}

fn tag(key: &SecretKey, code: CodeParams, blocks: &[SyndromeBlock]) -> [u8; HASH_BYTES] {
    hash128(&tag_input(key, code, blocks))
}

fn blocks_of<'a>(bits: &'a BitVector, n: usize, count: usize) -> impl Iterator<Item = BitVector> + 'a {
    (0..count).map(move |b| bits.slice(b * n, n))
}

fn check_len(available: usize, code: CodeParams, key_bits: usize) -> Result<usize> {
    let need = response_bits_needed(code, key_bits);
    if available < need {
        return Err(Error::param(format!(
            "{code} with {key_bits}-bit key needs {need} response bits, {available} available"
        )));
    }
    Ok(need)
}

/// Masked response bits as the token sees them, with erased debias pairs
/// filled with zeros.
pub fn read_challenge(challenge: &Challenge, measurement: &BitVector) -> Result<BitVector> {
    if measurement.len() != challenge.num_cells {
        return Err(Error::param(format!(
            "measurement has {} cells, challenge expects {}",
            measurement.len(),
            challenge.num_cells
        )));
    }
    let bits = measurement.select(&challenge.mask);
    match &challenge.pair_selection {
        Some(sel) => apply_pair_selection(&bits, sel),
        None => Ok(bits),
    }
}

/// Reference `j` of the record as used by the server.
pub fn reference_bits(record: &EnrollmentRecord, j: usize) -> Result<BitVector> {
    let r = record
        .references()
        .get(j)
        .ok_or_else(|| Error::Lookup(format!("reference index {j}")))?;
    match &record.debias_meta {
        Some(meta) => apply_pair_selection(&r.bits, &meta.pair_selection),
        None => Ok(r.bits.clone()),
    }
}

/// Token side: helper data and key from the noisy response `r_prime`.
pub fn token_generate(r_prime: &BitVector, code: &BchCode, key_bits: usize) -> Result<TokenOutput> {
    if key_bits == 0 {
        return Err(Error::param("key_bits must be positive"));
    }
    let params = code.params();
    let need = check_len(r_prime.len(), params, key_bits)?;
    let used = r_prime.slice(0, need);
    let blocks = blocks_of(&used, params.n, params.blocks_for(key_bits))
        .map(|b| code.gen_syndrome(&b))
        .collect::<Result<Vec<_>>>()?;
    let key = key_from_response(&used);
    let t = tag(&key, params, &blocks);
    Ok(TokenOutput {
        helper: HelperData::new(params, blocks, t)?,
        key,
    })
}

fn check_helper_code(helper: &HelperData, code: &BchCode) -> Result<()> {
    if helper.code() != code.params() {
        return Err(Error::Protocol(format!(
            "helper data is for {}, server uses {}",
            helper.code(),
            code.params()
        )));
    }
    Ok(())
}

/// Decodes every block of `reference` towards the token's response.
/// `None` when some block could not be corrected.
fn reconstruct(reference: &BitVector, helper: &HelperData, code: &BchCode) -> Result<Option<BitVector>> {
    let n = code.n();
    let mut out = BitVector::zeros(0);
    for (block, syndrome) in blocks_of(reference, n, helper.blocks().len()).zip(helper.blocks()) {
        match code.decode_syndrome(&block, syndrome)? {
            DecodeOutcome::Corrected { word, .. } => out.extend_from(&word),
            DecodeOutcome::Failed(_) => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Server side, trying references in enrollment order.
pub fn server_recover(helper: &HelperData, record: &EnrollmentRecord, code: &BchCode) -> Result<RecoveryResult> {
    server_recover_ordered(helper, record, code, AttemptOrder::Enrollment)
}

pub fn server_recover_ordered(
    helper: &HelperData,
    record: &EnrollmentRecord,
    code: &BchCode,
    order: AttemptOrder,
) -> Result<RecoveryResult> {
    check_helper_code(helper, code)?;
    let need = helper.blocks().len() * code.n();
    if record.response_len() < need {
        return Err(Error::param(format!(
            "helper data covers {need} bits, references hold {}",
            record.response_len()
        )));
    }
    let mut indices: Vec<usize> = (0..record.len()).collect();
    if let AttemptOrder::NearestTo(temp) = order {
        let refs = record.references();
        indices.sort_by(|&a, &b| {
            let da = (refs[a].temperature_c as f64 - temp).abs();
            let db = (refs[b].temperature_c as f64 - temp).abs();
            da.total_cmp(&db)
        });
    }
    for (attempt, &j) in indices.iter().enumerate() {
        let reference = reference_bits(record, j)?;
        if let Some(candidate) = reconstruct(&reference, helper, code)? {
            let key = key_from_response(&candidate);
            if tag(&key, helper.code(), helper.blocks()) == *helper.tag() {
                return Ok(RecoveryResult {
                    key: Some(key),
                    reference_index: Some(j),
                    attempts: attempt + 1,
                });
            }
        }
    }
    Ok(RecoveryResult {
        key: None,
        reference_index: None,
        attempts: indices.len(),
    })
}

/// Classic fuzzy extractor enrollment: helper data from the reference and
/// a key from the reference bits.
pub fn fe_enroll(reference: &BitVector, code: &BchCode, key_bits: usize) -> Result<TokenOutput> {
    token_generate(reference, code, key_bits)
}

/// Classic fuzzy extractor reproduction on the device: corrects the noisy
/// response towards the enrolled reference.
pub fn fe_reproduce(r_prime: &BitVector, helper: &HelperData, code: &BchCode) -> Result<Option<SecretKey>> {
    check_helper_code(helper, code)?;
    let need = helper.blocks().len() * code.n();
    if r_prime.len() < need {
        return Err(Error::param(format!("response has {} bits, {need} needed", r_prime.len())));
    }
    Ok(reconstruct(r_prime, helper, code)?
        .map(|c| key_from_response(&c))
        .filter(|k| tag(k, helper.code(), helper.blocks()) == *helper.tag()))
}
