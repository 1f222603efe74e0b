//! Code selection against a failure-rate target.
//!
//! A BER profile holds one row per evaluation condition and one column per
//! enrollment reference. A code is feasible when its multi-reference key
//! failure rate stays below the target on the worst row. Among feasible
//! codes the one with the smallest token cost `L * n * (n - k)` wins; ties
//! go to the smaller `n`, then the smaller `t`.

use serde::{Deserialize, Serialize};

use super::failure::FailureBudget;
use crate::bch::{extension_degree, CodeParams};
use crate::error::{Error, Result};

/// Bit operations to compute `L` syndromes of `n` bits each.
pub fn encode_cost(code: CodeParams, blocks: usize) -> u64 {
    (blocks * code.n * code.redundancy()) as u64
}

/// Bit-operation estimate of a full syndrome decode of `L` blocks: the
/// syndrome itself, then `2t` power sums, Berlekamp-Massey and a Chien
/// search, each GF(2^m) multiplication counted as `m^2` bit operations.
pub fn decode_cost(code: CodeParams, blocks: usize) -> u64 {
    let m = extension_degree(code.n).unwrap_or(0) as u64;
    let (n, t) = (code.n as u64, code.t as u64);
    let field_mults = 2 * t * n + 4 * t * t + n * t;
    blocks as u64 * (encode_cost(code, 1) + field_mults * m * m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub code: CodeParams,
    pub blocks: usize,
    /// Row of the profile that bounds the failure rate.
    pub worst_condition: usize,
    pub budget: FailureBudget,
    pub encode_cost: u64,
    pub decode_cost: u64,
    pub helper_bits: usize,
}

/// Worst-row failure budget of `code` over `profile`.
pub fn evaluate_code(code: CodeParams, key_bits: usize, profile: &[Vec<f64>]) -> Result<(usize, FailureBudget)> {
    let blocks = code.blocks_for(key_bits);
    let mut worst: Option<(usize, FailureBudget)> = None;
    for (c, row) in profile.iter().enumerate() {
        let b = FailureBudget::compute(code, blocks, row)?;
        if worst.as_ref().map_or(true, |(_, w)| b.p_fail > w.p_fail) {
            worst = Some((c, b));
        }
    }
    worst.ok_or_else(|| Error::param("empty BER profile"))
}

pub fn plan_code(target: f64, key_bits: usize, profile: &[Vec<f64>], catalog: &[CodeParams]) -> Result<PlanResult> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::param(format!("target {target} outside (0, 1)")));
    }
    if key_bits == 0 {
        return Err(Error::param("key_bits must be positive"));
    }
    if catalog.is_empty() {
        return Err(Error::param("empty code catalog"));
    }
    if profile.is_empty() || profile.iter().any(|r| r.is_empty() || r.len() != profile[0].len()) {
        return Err(Error::param("BER profile rows must be non-empty and of equal length"));
    }
    let mut best: Option<PlanResult> = None;
    let mut closest: Option<FailureBudget> = None;
    for &code in catalog {
        let (worst_condition, budget) = evaluate_code(code, key_bits, profile)?;
        if closest.as_ref().map_or(true, |c| budget.p_fail < c.p_fail) {
            closest = Some(budget.clone());
        }
        if budget.p_fail >= target {
            continue;
        }
        let blocks = budget.blocks;
        let candidate = PlanResult {
            code,
            blocks,
            worst_condition,
            encode_cost: encode_cost(code, blocks),
            decode_cost: decode_cost(code, blocks),
            helper_bits: blocks * code.redundancy(),
            budget,
        };
        let key = |p: &PlanResult| (p.encode_cost, p.code.n, p.code.t);
        if best.as_ref().map_or(true, |b| key(&candidate) < key(b)) {
            best = Some(candidate);
        }
    }
    best.ok_or_else(|| {
        let c = closest.expect("catalog is non-empty");
        Error::Planning {
            best_pfail: c.p_fail,
            n: c.code.n,
            k: c.code.k,
            t: c.code.t,
        }
    })
}
