//! Frozen calibration and protocol constants.

use crate::puf::PopulationParams;

/// Version tag of [`CALIBRATED_POPULATION`]; bump whenever a value changes.
pub const POPULATION_VERSION: &str = "sram-pop-v1";

/// Default chip population.
///
/// Calibrated by simulation against the qualitative shape of measured
/// SRAM reliability: a single 25 °C power-up disagrees with another
/// 25 °C power-up on about 5 % of cells, the fraction of ones is about
/// 49.9 %, a 25 °C preselected reference degrades to about 6.4 % BER at
/// the extremes of the -15..80 °C range, and three references at -15,
/// 25 and 80 °C keep the worst-case BER near 2.5 %.
pub const CALIBRATED_POPULATION: PopulationParams = PopulationParams {
    skew_mean: -0.03,
    skew_sigma: 9.0,
    sensitivity_sigma: 0.055,
    noise_sigma: 1.0,
    noise_log_spread: 0.1,
};

/// Operating temperatures of the reference measurement campaign.
pub const CAMPAIGN_TEMPERATURES_C: [i32; 5] = [-15, 0, 25, 40, 80];

/// Cells and repeats per condition of the reference campaign.
pub const CAMPAIGN_CELLS: usize = 16_384;
pub const CAMPAIGN_REPEATS: usize = 100;

/// Repeats consumed by preselection at the reference condition.
pub const DEFAULT_PRESEL_REPEATS: usize = 10;
/// Repeats per majority vote at the other conditions.
pub const DEFAULT_MV_REPEATS: usize = 9;

/// Key length in bits.
pub const KEY_BITS: usize = 128;

/// Target key failure rate used when planning.
pub const DEFAULT_TARGET_PFAIL: f64 = 1e-6;
