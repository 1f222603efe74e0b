//! Empirical validation of key failure rates.

use std::io::Write;
use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bch::BchCode;
use crate::bits::BitVector;
use crate::enrollment::EnrollmentRecord;
use crate::error::{Error, Result};
use crate::keygen::{reference_bits, server_recover, token_generate};
use crate::puf::{one_probabilities, sample_bits, CellModel, PufDataset};
use crate::rng::derived_rng;

/// Where each trial's noisy token response comes from.
#[derive(Debug, Clone)]
pub enum ResponseSource<'a> {
    /// Fresh power-ups of simulated cells at a temperature. `cells` is the
    /// whole chip; the record's mask selects from it.
    Simulated { cells: &'a [CellModel], temperature_c: f64 },
    /// Stored measurements, cycling through `repeats`.
    Dataset {
        dataset: &'a PufDataset,
        condition: &'a str,
        repeats: Range<usize>,
    },
    /// Reference `reference` with every bit flipped independently.
    IidFlip { ber: f64, reference: usize },
    /// Reference `reference` with bursts of `burst` adjacent flips, bursts
    /// starting with probability `ber / burst` per bit.
    CorrelatedFlip { ber: f64, burst: usize, reference: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub success: bool,
    pub attempts: usize,
    pub reference_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    /// Wilson score interval at `z` standard deviations.
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
    pub mean_attempts: f64,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub trials: usize,
    pub seed: u64,
    pub key_bits: usize,
    pub z: f64,
    pub keep_records: bool,
}

impl MonteCarloConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        MonteCarloConfig {
            trials,
            seed,
            key_bits: crate::config::KEY_BITS,
            z: 3.0,
            keep_records: false,
        }
    }
}

enum Prepared {
    Probabilities(Vec<f64>),
    Stored(Vec<BitVector>),
    Iid(BitVector, f64),
    Burst(BitVector, f64, usize),
}

fn prepare(source: &ResponseSource<'_>, record: &EnrollmentRecord, need: usize) -> Result<Prepared> {
    let mask = &record.challenge_mask()[..need];
    let check_ber = |ber: f64| {
        if (0.0..=1.0).contains(&ber) {
            Ok(())
        } else {
            Err(Error::param(format!("ber {ber} outside [0, 1]")))
        }
    };
    Ok(match *source {
        ResponseSource::Simulated { cells, temperature_c } => {
            if cells.len() != record.num_cells {
                return Err(Error::param(format!(
                    "chip has {} cells, record {}",
                    cells.len(),
                    record.num_cells
                )));
            }
            let picked: Vec<CellModel> = mask.iter().map(|&a| cells[a as usize]).collect();
            Prepared::Probabilities(one_probabilities(&picked, temperature_c))
        }
        ResponseSource::Dataset { dataset, condition, ref repeats } => {
            let all = dataset.repeats(condition)?;
            if repeats.is_empty() || repeats.end > all.len() {
                return Err(Error::param(format!("repeat range {repeats:?} invalid for {condition}")));
            }
            if dataset.num_cells() != record.num_cells {
                return Err(Error::param("dataset and record disagree on num_cells"));
            }
            Prepared::Stored(all[repeats.clone()].iter().map(|r| r.select(mask)).collect())
        }
        ResponseSource::IidFlip { ber, reference } => {
            check_ber(ber)?;
            Prepared::Iid(reference_bits(record, reference)?.slice(0, need), ber)
        }
        ResponseSource::CorrelatedFlip { ber, burst, reference } => {
            check_ber(ber)?;
            if burst == 0 {
                return Err(Error::param("burst length must be positive"));
            }
            Prepared::Burst(reference_bits(record, reference)?.slice(0, need), ber, burst)
        }
    })
}

impl Prepared {
    fn sample(&self, seed: u64, trial: usize) -> BitVector {
        let mut rng = derived_rng(seed, "montecarlo", trial as u64);
        match self {
            Prepared::Probabilities(p) => sample_bits(p, &mut rng),
            Prepared::Stored(reps) => reps[trial % reps.len()].clone(),
            Prepared::Iid(base, ber) => {
                let mut b = base.clone();
                for i in 0..b.len() {
                    if rng.random::<f64>() < *ber {
                        b.flip(i);
                    }
                }
                b
            }
            Prepared::Burst(base, ber, burst) => {
                let mut b = base.clone();
                let start_p = ber / *burst as f64;
                for i in 0..b.len() {
                    if rng.random::<f64>() < start_p {
                        for j in i..(i + burst).min(b.len()) {
                            b.flip(j);
                        }
                    }
                }
                b
            }
        }
    }
}

/// Runs `config.trials` independent token/server rounds against `record`
/// and reports the observed key failure rate.
///
/// Trial `i` draws its randomness from a seed derived from
/// `(config.seed, i)`, so results do not depend on thread scheduling.
pub fn montecarlo_failure(
    record: &EnrollmentRecord,
    code: &BchCode,
    source: ResponseSource<'_>,
    config: &MonteCarloConfig,
) -> Result<MonteCarloReport> {
    if config.trials == 0 {
        return Err(Error::param("at least one trial required"));
    }
    let need = crate::keygen::response_bits_needed(code.params(), config.key_bits);
    if record.response_len() < need {
        return Err(Error::param(format!(
            "{} needs {need} response bits, record holds {}",
            code.params(),
            record.response_len()
        )));
    }
    let prepared = prepare(&source, record, need)?;
    let pair_selection = record.debias_meta.as_ref().map(|m| m.pair_selection.slice(0, need / 2));

    let records = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut r_prime = prepared.sample(config.seed, trial);
            if let Some(sel) = &pair_selection {
                r_prime = crate::analytics::debias::apply_pair_selection(&r_prime, sel)?;
            }
            let token = token_generate(&r_prime, code, config.key_bits)?;
            let rec = server_recover(&token.helper, record, code)?;
            Ok(TrialRecord {
                trial,
                success: rec.key.as_ref() == Some(&token.key),
                attempts: rec.attempts,
                reference_index: rec.reference_index,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let failures = records.iter().filter(|r| !r.success).count();
    let (ci_low, ci_high) = wilson_interval(failures, config.trials, config.z);
    Ok(MonteCarloReport {
        trials: config.trials,
        failures,
        failure_rate: failures as f64 / config.trials as f64,
        ci_low,
        ci_high,
        z: config.z,
        mean_attempts: records.iter().map(|r| r.attempts as f64).sum::<f64>() / config.trials as f64,
        records: if config.keep_records { records } else { Vec::new() },
    })
}

/// Writes per-trial records as CSV: `trial,condition,success,attempts,reference`.
pub fn write_trial_csv<W: Write>(mut out: W, condition: &str, records: &[TrialRecord]) -> std::io::Result<()> {
    writeln!(out, "trial,condition,success,attempts,reference")?;
    for r in records {
        let reference = r.reference_index.map(|j| j.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", r.trial, condition, r.success as u8, r.attempts, reference)?;
    }
    Ok(())
}
