//! Hidden-variable SRAM cell model.
//!
//! Each cell carries a latent skew (the threshold-voltage mismatch of its
//! cross-coupled inverters, in units of the noise scale), a linear
//! temperature drift, and a noise scale. The probability of powering up
//! as `1` at temperature `T` is
//!
//! ```text
//! P(1) = Phi((latent_skew + temp_sensitivity * (T - 25)) / noise_sigma)
//! ```
//!
//! where `Phi` is the standard normal CDF. Drift sensitivities are drawn
//! with random sign, so a fraction of cells switch preference as the
//! temperature moves away from 25 °C.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, derived_rng};

/// Temperature at which drift is zero.
pub const NOMINAL_TEMPERATURE_C: i32 = 25;
pub const MIN_TEMPERATURE_C: i32 = -55;
pub const MAX_TEMPERATURE_C: i32 = 125;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub temperature_c: i32,
}

impl Condition {
    pub fn new(label: impl Into<String>, temperature_c: i32) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::param("condition label must not be empty"));
        }
        if !(MIN_TEMPERATURE_C..=MAX_TEMPERATURE_C).contains(&temperature_c) {
            return Err(Error::param(format!(
                "temperature {temperature_c} outside [{MIN_TEMPERATURE_C}, {MAX_TEMPERATURE_C}]"
            )));
        }
        Ok(Condition {
            label,
            temperature_c,
        })
    }

    /// Condition labelled by its temperature, e.g. `-15C`.
    pub fn at(temperature_c: i32) -> Result<Self> {
        Self::new(format!("{temperature_c}C"), temperature_c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellModel {
    pub latent_skew: f64,
    pub temp_sensitivity: f64,
    pub noise_sigma: f64,
}

impl CellModel {
    /// Probability that the cell powers up as `1` at `temperature_c`,
    /// clamped into the open interval (0, 1).
    pub fn one_probability(&self, temperature_c: f64) -> f64 {
        let drift = self.temp_sensitivity * (temperature_c - NOMINAL_TEMPERATURE_C as f64);
        normal_cdf((self.latent_skew + drift) / self.noise_sigma).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }

    /// Value the cell favours at `temperature_c` (ties go to `0`).
    pub fn preferred_bit(&self, temperature_c: f64) -> bool {
        self.one_probability(temperature_c) > 0.5
    }

    /// Probability of disagreeing with the value preferred at `enroll_c`
    /// when powered up at `eval_c`.
    pub fn flip_probability(&self, enroll_c: f64, eval_c: f64) -> f64 {
        let p = self.one_probability(eval_c);
        if self.preferred_bit(enroll_c) {
            1.0 - p
        } else {
            p
        }
    }
}

/// Fabrication-variation parameters of a chip population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationParams {
    pub skew_mean: f64,
    pub skew_sigma: f64,
    pub sensitivity_sigma: f64,
    /// Median per-cell noise scale.
    pub noise_sigma: f64,
    /// Standard deviation of `ln(noise_sigma)` across cells.
    pub noise_log_spread: f64,
}

impl PopulationParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.skew_mean,
            self.skew_sigma,
            self.sensitivity_sigma,
            self.noise_sigma,
            self.noise_log_spread,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::param("population parameters must be finite"));
        }
        for (name, v) in [
            ("skew_sigma", self.skew_sigma),
            ("sensitivity_sigma", self.sensitivity_sigma),
            ("noise_sigma", self.noise_sigma),
        ] {
            if v <= 0.0 {
                return Err(Error::param(format!("{name} must be positive, got {v}")));
            }
        }
        if self.noise_log_spread < 0.0 {
            return Err(Error::param("noise_log_spread must be non-negative"));
        }
        Ok(())
    }
}

impl Default for PopulationParams {
    fn default() -> Self {
        crate::config::CALIBRATED_POPULATION
    }
}

/// Draws `num_cells` independent cell models for one chip.
pub fn sample_chip(num_cells: usize, params: &PopulationParams, seed: u64) -> Result<Vec<CellModel>> {
    if num_cells == 0 {
        return Err(Error::param("num_cells must be at least 1"));
    }
    params.validate()?;
    let mut rng = derived_rng(seed, "cells", 0);
    let cells = (0..num_cells)
        .map(|_| {
            let z: [f64; 3] = [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ];
            CellModel {
                latent_skew: params.skew_mean + params.skew_sigma * z[0],
                temp_sensitivity: params.sensitivity_sigma * z[1],
                noise_sigma: params.noise_sigma * (params.noise_log_spread * z[2]).exp(),
            }
        })
        .collect();
    Ok(cells)
}

/// One-probabilities of every cell at a temperature.
pub fn one_probabilities(cells: &[CellModel], temperature_c: f64) -> Vec<f64> {
    cells.iter().map(|c| c.one_probability(temperature_c)).collect()
}

/// Samples one bit per probability.
pub fn sample_bits<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> BitVector {
    probs.iter().map(|&p| rng.random::<f64>() < p).collect()
}

/// Simulates one power-up of `cells` at `condition`.
///
/// The result depends only on `(cells, condition, seed)`.
pub fn power_up(cells: &[CellModel], condition: &Condition, seed: u64) -> Result<BitVector> {
    if cells.is_empty() {
        return Err(Error::param("power_up needs at least one cell"));
    }
    let probs = one_probabilities(cells, condition.temperature_c as f64);
    let mut rng = derived_rng(seed, "power-up", condition.temperature_c as i64 as u64);
    Ok(sample_bits(&probs, &mut rng))
}

/// Seed for repeat `index` of a simulated measurement campaign.
pub fn repeat_seed(seed: u64, condition: &Condition, index: usize) -> u64 {
    derive_seed(derive_seed(seed, &condition.label, index as u64), "repeat", index as u64)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(skew: f64, sens: f64) -> CellModel {
        CellModel {
            latent_skew: skew,
            temp_sensitivity: sens,
            noise_sigma: 1.0,
        }
    }

    #[test]
    fn sample_chip_is_deterministic() {
        let p = PopulationParams::default();
        let a = sample_chip(16384, &p, 1).unwrap();
        let b = sample_chip(16384, &p, 1).unwrap();
        assert_eq!(a.len(), 16384);
        assert_eq!(a, b);
    }

    #[test]
    fn seed_changes_chip() {
        let p = PopulationParams::default();
        let a = sample_chip(1000, &p, 1).unwrap();
        let b = sample_chip(1000, &p, 2).unwrap();
        assert!(a.iter().zip(&b).any(|(x, y)| x.latent_skew != y.latent_skew));
    }

    #[test]
    fn degenerate_population_rejected() {
        let p = PopulationParams {
            skew_sigma: 0.0,
            ..PopulationParams::default()
        };
        assert!(matches!(sample_chip(1, &p, 1), Err(Error::Parameter(_))));
        let p = PopulationParams {
            noise_sigma: -1.0,
            ..PopulationParams::default()
        };
        assert!(matches!(sample_chip(1, &p, 1), Err(Error::Parameter(_))));
        assert!(sample_chip(0, &PopulationParams::default(), 1).is_err());
    }

    #[test]
    fn saturated_cell_is_stable() {
        let cells = vec![cell(1e3, 0.0), cell(-1e3, 0.0)];
        let cond = Condition::at(25).unwrap();
        for s in 0..200 {
            let bits = power_up(&cells, &cond, s).unwrap();
            assert!(bits.get(0));
            assert!(!bits.get(1));
        }
    }

    #[test]
    fn symmetric_cell_is_fair() {
        let cells = vec![cell(0.0, 0.3); 10_000];
        let cond = Condition::at(25).unwrap();
        let ones = power_up(&cells, &cond, 9).unwrap().count_ones() as f64;
        let n = 10_000.0;
        let sd = (n * 0.25f64).sqrt();
        assert!((ones - n / 2.0).abs() < 3.0 * sd, "ones = {ones}");
    }

    #[test]
    fn probability_stays_open() {
        let c = cell(1e6, 0.0);
        let p = c.one_probability(25.0);
        assert!(p < 1.0 && p > 0.0);
        let c = cell(-1e6, 0.0);
        assert!(c.one_probability(25.0) > 0.0);
    }

    #[test]
    fn power_up_depends_on_seed_and_condition() {
        let cells = sample_chip(4096, &PopulationParams::default(), 3).unwrap();
        let c25 = Condition::at(25).unwrap();
        let c80 = Condition::at(80).unwrap();
        assert_eq!(power_up(&cells, &c25, 1).unwrap(), power_up(&cells, &c25, 1).unwrap());
        assert_ne!(power_up(&cells, &c25, 1).unwrap(), power_up(&cells, &c25, 2).unwrap());
        assert_ne!(power_up(&cells, &c25, 1).unwrap(), power_up(&cells, &c80, 1).unwrap());
    }

    #[test]
    fn condition_range_checked() {
        assert!(Condition::at(-55).is_ok());
        assert!(Condition::at(125).is_ok());
        assert!(Condition::at(-56).is_err());
        assert!(Condition::at(126).is_err());
    }

    // Per cell, the flip probability against the enrollment-temperature
    // preference is monotone in T on each side of the enrollment point.
    // Averaged over the population it grows with |T - T_enroll| in both
    // directions.
    #[test]
    fn noise_grows_away_from_enrollment() {
        let cells = sample_chip(100_000, &PopulationParams::default(), 11).unwrap();
        for enroll in [-15.0, 25.0, 80.0] {
            let mean_flip = |t: f64| cells.iter().map(|c| c.flip_probability(enroll, t)).sum::<f64>() / cells.len() as f64;
            let mut prev = mean_flip(enroll);
            for d in (5..=60).step_by(5) {
                let up = mean_flip(enroll + d as f64);
                assert!(up >= prev, "enroll {enroll} +{d}: {up} < {prev}");
                prev = up;
            }
            let mut prev = mean_flip(enroll);
            for d in (5..=60).step_by(5) {
                let down = mean_flip(enroll - d as f64);
                assert!(down >= prev, "enroll {enroll} -{d}: {down} < {prev}");
                prev = down;
            }
        }
        for c in cells.iter().take(2000) {
            let probs: Vec<f64> = (-55..=125).step_by(5).map(|t| c.one_probability(t as f64)).collect();
            let increasing = probs.windows(2).all(|w| w[1] >= w[0]);
            let decreasing = probs.windows(2).all(|w| w[1] <= w[0]);
            assert!(increasing || decreasing);
        }
    }
}
