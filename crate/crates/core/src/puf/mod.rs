//! SRAM PUF response modelling, measurement datasets and quality metrics.

mod dataset;
mod model;
mod quality;

pub use dataset::{load_dataset, save_dataset, PufDataset, DATASET_FORMAT_VERSION, MANIFEST_FILE};
pub use model::{
    normal_cdf, one_probabilities, power_up, repeat_seed, sample_bits, sample_chip, CellModel, Condition,
    PopulationParams, MAX_TEMPERATURE_C, MIN_TEMPERATURE_C, NOMINAL_TEMPERATURE_C,
};
pub use quality::{compute_ber, compute_ber_in, measure_quality, measure_quality_multi, per_cell_majority, QualityReport};
