//! Key failure rates under i.i.d. bit errors.
//!
//! - Block failure: probability that more than `t` of `n` bits err,
//!   `1 - F_B(t; n, ber)`.
//! - Key failure over `L` independent blocks: `1 - (1 - p1)^L`.
//! - Multi-reference failure: the minimum of the per-reference key
//!   failure rates, a conservative stand-in for the union bound.

use serde::{Deserialize, Serialize};

use crate::bch::CodeParams;
use crate::error::{Error, Result};

/// Neumaier-compensated sum.
fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Probability that more than `t` of `n` bits are in error when each errs
/// independently with probability `ber`.
///
/// The upper tail is summed directly in log space, so small results keep
/// full relative precision.
pub fn block_failure(n: usize, t: usize, ber: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ber) {
        return Err(Error::param(format!("ber {ber} outside [0, 1]")));
    }
    if t >= n {
        return Err(Error::param(format!("t = {t} must be below n = {n}")));
    }
    if ber == 0.0 {
        return Ok(0.0);
    }
    if ber == 1.0 {
        return Ok(1.0);
    }
    let (ln_p, ln_q) = (ber.ln(), (-ber).ln_1p());
    // ln C(n, i), built incrementally
    let mut ln_choose = 0.0f64;
    let mut terms = Vec::with_capacity(n - t);
    for i in 1..=n {
        ln_choose += ((n - i + 1) as f64 / i as f64).ln();
        if i > t {
            terms.push((ln_choose + i as f64 * ln_p + (n - i) as f64 * ln_q).exp());
        }
    }
    // smallest first
    let p = compensated_sum(terms.into_iter().rev());
    Ok(p.clamp(0.0, 1.0))
}

/// `1 - (1 - p1)^L`, via `expm1`/`ln_1p`.
pub fn key_failure_l(p1: f64, blocks: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::param(format!("p1 {p1} outside [0, 1]")));
    }
    if blocks == 0 {
        return Err(Error::param("at least one block required"));
    }
    Ok((-(blocks as f64 * (-p1).ln_1p()).exp_m1()).clamp(0.0, 1.0))
}

/// Minimum over the per-reference key failure rates.
pub fn key_failure_mrr(p2: &[f64]) -> Result<f64> {
    if p2.is_empty() {
        return Err(Error::param("at least one reference required"));
    }
    if let Some(bad) = p2.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::param(format!("failure rate {bad} outside [0, 1]")));
    }
    Ok(p2.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Failure-rate chain for one code and one set of per-reference BERs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureBudget {
    pub per_reference_ber: Vec<f64>,
    pub code: CodeParams,
    pub blocks: usize,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub p_fail: f64,
}

impl FailureBudget {
    pub fn compute(code: CodeParams, blocks: usize, per_reference_ber: &[f64]) -> Result<Self> {
        let p1 = per_reference_ber
            .iter()
            .map(|&b| block_failure(code.n, code.t, b))
            .collect::<Result<Vec<_>>>()?;
        let p2 = p1.iter().map(|&p| key_failure_l(p, blocks)).collect::<Result<Vec<_>>>()?;
        let p_fail = key_failure_mrr(&p2)?;
        Ok(FailureBudget {
            per_reference_ber: per_reference_ber.to_vec(),
            code,
            blocks,
            p1,
            p2,
            p_fail,
        })
    }
}
