use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::dataset::PufDataset;
use crate::bits::BitVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    /// Fraction of ones over every measurement in the dataset.
    pub bias: f64,
    /// Mean fractional distance between the reference-condition majority
    /// and each repeat at that condition.
    pub intra_hd: f64,
    /// Mean pairwise fractional distance between chips; `None` for a
    /// single chip.
    pub inter_hd: Option<f64>,
    pub per_cell_flip_prob: Vec<f64>,
}

/// Per-cell majority over `repeats`; an exact tie resolves to `0`.
pub fn per_cell_majority(repeats: &[BitVector]) -> BitVector {
    let n = repeats[0].len();
    let counts = count_ones_per_cell(repeats);
    (0..n).map(|i| 2 * counts[i] > repeats.len()).collect()
}

fn count_ones_per_cell(repeats: &[BitVector]) -> Vec<usize> {
    let n = repeats[0].len();
    let mut counts = vec![0usize; n];
    for r in repeats {
        for i in r.ones_indices() {
            counts[i] += 1;
        }
    }
    counts
}

pub fn measure_quality(dataset: &PufDataset, reference_condition: &str) -> Result<QualityReport> {
    let reps = dataset.repeats(reference_condition)?;
    let n = dataset.num_cells();
    let majority = per_cell_majority(reps);

    let mut ones = 0usize;
    let mut total = 0usize;
    for m in dataset.all_measurements() {
        ones += m.count_ones();
        total += m.len();
    }

    let mut disagreements = vec![0usize; n];
    let mut hd_sum = 0usize;
    for r in reps {
        let diff = r ^ &majority;
        hd_sum += diff.count_ones();
        for i in diff.ones_indices() {
            disagreements[i] += 1;
        }
    }
    let per_cell_flip_prob = disagreements
        .iter()
        .map(|&d| d as f64 / reps.len() as f64)
        .collect();

    Ok(QualityReport {
        bias: ones as f64 / total as f64,
        intra_hd: hd_sum as f64 / (n * reps.len()) as f64,
        inter_hd: None,
        per_cell_flip_prob,
    })
}

/// Quality of several chips: the first chip's report with `inter_hd`
/// filled in, and `bias` pooled over all chips.
pub fn measure_quality_multi(datasets: &[PufDataset], reference_condition: &str) -> Result<QualityReport> {
    let first = datasets
        .first()
        .ok_or_else(|| Error::param("at least one dataset required"))?;
    let mut report = measure_quality(first, reference_condition)?;
    if datasets.len() < 2 {
        return Ok(report);
    }
    let n = first.num_cells();
    if datasets.iter().any(|d| d.num_cells() != n) {
        return Err(Error::param("all chips must have the same number of cells"));
    }
    let majorities = datasets
        .iter()
        .map(|d| d.repeats(reference_condition).map(per_cell_majority))
        .collect::<Result<Vec<_>>>()?;

    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..majorities.len() {
        for j in i + 1..majorities.len() {
            sum += majorities[i].hamming_distance(&majorities[j]) as f64 / n as f64;
            pairs += 1;
        }
    }
    let (ones, total) = datasets
        .iter()
        .flat_map(|d| d.all_measurements())
        .fold((0usize, 0usize), |(o, t), m| (o + m.count_ones(), t + m.len()));
    report.bias = ones as f64 / total as f64;
    report.inter_hd = Some(sum / pairs as f64);
    Ok(report)
}

/// Mean fractional distance between `reference` (one bit per `mask`
/// address) and each repeat at `condition`, over the masked cells.
pub fn compute_ber(reference: &BitVector, mask: &[u32], dataset: &PufDataset, condition: &str) -> Result<f64> {
    let count = dataset.repeats(condition)?.len();
    compute_ber_in(reference, mask, dataset, condition, 0..count)
}

/// [`compute_ber`] restricted to a range of repeat indices.
pub fn compute_ber_in(
    reference: &BitVector,
    mask: &[u32],
    dataset: &PufDataset,
    condition: &str,
    repeats: Range<usize>,
) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::param("mask selects no cells"));
    }
    if reference.len() != mask.len() {
        return Err(Error::param(format!(
            "reference has {} bits but mask selects {}",
            reference.len(),
            mask.len()
        )));
    }
    if mask.iter().any(|&a| a as usize >= dataset.num_cells()) {
        return Err(Error::param("mask address beyond num_cells"));
    }
    let reps = dataset.repeat_range(condition, repeats)?;
    let total: usize = reps
        .iter()
        .map(|r| r.select(mask).hamming_distance(reference))
        .sum();
    Ok(total as f64 / (mask.len() * reps.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puf::model::Condition;

    fn ds(reps: Vec<BitVector>) -> PufDataset {
        let n = reps[0].len();
        PufDataset::new("c", n, vec![Condition::at(25).unwrap()], vec![reps]).unwrap()
    }

    #[test]
    fn all_zero_dataset() {
        let d = ds(vec![BitVector::zeros(100); 5]);
        let q = measure_quality(&d, "25C").unwrap();
        assert_eq!(q.bias, 0.0);
        assert_eq!(q.intra_hd, 0.0);
        assert!(q.inter_hd.is_none());
    }

    #[test]
    fn single_disagreement_shows_in_one_cell() {
        let a = BitVector::zeros(100);
        let mut b = a.clone();
        b.set(42, true);
        let q = measure_quality(&ds(vec![a, b]), "25C").unwrap();
        let nonzero: Vec<usize> = q
            .per_cell_flip_prob
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(nonzero, vec![42]);
    }

    #[test]
    fn unknown_condition_is_lookup_error() {
        let d = ds(vec![BitVector::zeros(8)]);
        assert!(matches!(measure_quality(&d, "80C"), Err(Error::Lookup(_))));
    }

    #[test]
    fn ber_extremes() {
        let r = BitVector::from_bit_str("1011001").unwrap();
        let not_r: BitVector = r.iter().map(|b| !b).collect();
        let mask: Vec<u32> = (0..7).collect();
        assert_eq!(compute_ber(&r, &mask, &ds(vec![r.clone(); 4]), "25C").unwrap(), 0.0);
        assert_eq!(compute_ber(&r, &mask, &ds(vec![not_r; 4]), "25C").unwrap(), 1.0);
        assert!(matches!(
            compute_ber(&BitVector::zeros(0), &[], &ds(vec![r.clone()]), "25C"),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn ber_uses_only_masked_cells() {
        let reference = BitVector::from_bit_str("11").unwrap();
        let measured = BitVector::from_bit_str("1001").unwrap();
        // cells 0 and 3 agree with the reference; 1 and 2 are ignored.
        assert_eq!(compute_ber(&reference, &[0, 3], &ds(vec![measured]), "25C").unwrap(), 0.0);
    }
}
