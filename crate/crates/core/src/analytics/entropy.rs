use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bias band within which lengthening the response compensates bias.
pub const LOW_BIAS_BAND: (f64, f64) = (0.42, 0.58);

/// Min-entropy ledger of one key-generation configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub response_bits: usize,
    pub helper_bits: usize,
    pub bias: f64,
    /// `response_bits * -log2(max(bias, 1 - bias))`.
    pub min_entropy_in: f64,
    /// `max(0, min_entropy_in - helper_bits)`.
    pub residual_min_entropy: f64,
    pub key_bits: usize,
    /// Residual entropy below the key length.
    pub insufficient_entropy: bool,
    /// Bias outside the low-bias band; debias before key generation.
    pub debiasing_required: bool,
}

pub fn entropy_report(response_bits: usize, helper_bits: usize, bias: f64, key_bits: usize) -> Result<EntropyReport> {
    if !(bias > 0.0 && bias < 1.0) {
        return Err(Error::param(format!("bias {bias} must lie strictly between 0 and 1")));
    }
    let per_bit = -bias.max(1.0 - bias).log2();
    let min_entropy_in = response_bits as f64 * per_bit;
    let residual = (min_entropy_in - helper_bits as f64).max(0.0);
    Ok(EntropyReport {
        response_bits,
        helper_bits,
        bias,
        min_entropy_in,
        residual_min_entropy: residual,
        key_bits,
        insufficient_entropy: residual < key_bits as f64,
        debiasing_required: !(LOW_BIAS_BAND.0..=LOW_BIAS_BAND.1).contains(&bias),
    })
}
