//! Measurement container and its on-disk format.
//!
//! A dataset directory holds `manifest.json` and one raw file per
//! condition. Raw files concatenate the repeats; each repeat is
//! `num_cells` bits packed least-significant-bit first and zero padded to
//! a byte boundary.

use std::collections::HashSet;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::model::{power_up, repeat_seed, CellModel, Condition};
use crate::bits::BitVector;
use crate::error::{Error, Result};

pub const DATASET_FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Repeated power-up measurements of one chip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PufDataset {
    chip_id: String,
    num_cells: usize,
    conditions: Vec<Condition>,
    measurements: Vec<Vec<BitVector>>,
}

impl PufDataset {
    pub fn new(
        chip_id: impl Into<String>,
        num_cells: usize,
        conditions: Vec<Condition>,
        measurements: Vec<Vec<BitVector>>,
    ) -> Result<Self> {
        if num_cells == 0 {
            return Err(Error::param("dataset needs at least one cell"));
        }
        if conditions.len() != measurements.len() {
            return Err(Error::param("one measurement set per condition required"));
        }
        let mut seen = HashSet::new();
        for (c, reps) in conditions.iter().zip(&measurements) {
            if !seen.insert(c.label.as_str()) {
                return Err(Error::param(format!("duplicate condition label {}", c.label)));
            }
            if reps.is_empty() {
                return Err(Error::param(format!("condition {} has no repeats", c.label)));
            }
            if let Some(bad) = reps.iter().find(|r| r.len() != num_cells) {
                return Err(Error::param(format!(
                    "condition {}: measurement of {} bits, expected {num_cells}",
                    c.label,
                    bad.len()
                )));
            }
        }
        Ok(PufDataset {
            chip_id: chip_id.into(),
            num_cells,
            conditions,
            measurements,
        })
    }

    /// Simulates `repeats` power-ups of `cells` at every condition.
    pub fn simulate(
        chip_id: impl Into<String>,
        cells: &[CellModel],
        conditions: &[Condition],
        repeats: usize,
        seed: u64,
    ) -> Result<Self> {
        if repeats == 0 {
            return Err(Error::param("repeats must be at least 1"));
        }
        let measurements = conditions
            .iter()
            .map(|c| {
                (0..repeats)
                    .map(|r| power_up(cells, c, repeat_seed(seed, c, r)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chip_id, cells.len(), conditions.to_vec(), measurements)
    }

    pub fn chip_id(&self) -> &str {
        &self.chip_id
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn condition(&self, label: &str) -> Result<&Condition> {
        Ok(&self.conditions[self.condition_index(label)?])
    }

    pub fn condition_index(&self, label: &str) -> Result<usize> {
        self.conditions
            .iter()
            .position(|c| c.label == label)
            .ok_or_else(|| Error::Lookup(format!("condition {label:?} not in dataset {}", self.chip_id)))
    }

    pub fn repeats(&self, label: &str) -> Result<&[BitVector]> {
        Ok(&self.measurements[self.condition_index(label)?])
    }

    /// A sub-range of the repeats at `label`.
    pub fn repeat_range(&self, label: &str, range: Range<usize>) -> Result<&[BitVector]> {
        let reps = self.repeats(label)?;
        if range.start >= range.end || range.end > reps.len() {
            return Err(Error::param(format!(
                "repeat range {range:?} invalid for {} repeats at {label}",
                reps.len()
            )));
        }
        Ok(&reps[range])
    }

    pub fn all_measurements(&self) -> impl Iterator<Item = &BitVector> {
        self.measurements.iter().flatten()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    chip_id: String,
    num_cells: usize,
    conditions: Vec<ManifestCondition>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestCondition {
    label: String,
    temperature_c: i32,
    repeats: usize,
    file: String,
}

fn raw_file_name(index: usize, label: &str) -> String {
    let clean: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("{index:02}_{clean}.bin")
}

/// Writes `dataset` into `dir` (created if missing) and returns the
/// manifest path.
pub fn save_dataset(dataset: &PufDataset, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(dataset.conditions.len());
    for (i, (c, reps)) in dataset.conditions.iter().zip(&dataset.measurements).enumerate() {
        let file = raw_file_name(i, &c.label);
        let mut raw = Vec::with_capacity(reps.len() * dataset.num_cells.div_ceil(8));
        for r in reps {
            raw.extend_from_slice(&r.to_bytes_lsb());
        }
        let path = dir.join(&file);
        fs::write(&path, raw).map_err(|e| Error::io(&path, e))?;
        entries.push(ManifestCondition {
            label: c.label.clone(),
            temperature_c: c.temperature_c,
            repeats: reps.len(),
            file,
        });
    }
    let manifest = Manifest {
        format_version: DATASET_FORMAT_VERSION,
        chip_id: dataset.chip_id.clone(),
        num_cells: dataset.num_cells,
        conditions: entries,
    };
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Reads a dataset from its manifest. Raw file paths are resolved
/// relative to the manifest's directory.
pub fn load_dataset(manifest_path: &Path) -> Result<PufDataset> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::format(manifest_path, e.to_string()))?;
    if manifest.format_version != DATASET_FORMAT_VERSION {
        return Err(Error::format(
            manifest_path,
            format!("unsupported format_version {}", manifest.format_version),
        ));
    }
    if manifest.num_cells == 0 {
        return Err(Error::format(manifest_path, "num_cells must be positive"));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let repeat_bytes = manifest.num_cells.div_ceil(8);
    let mut seen = HashSet::new();
    let mut conditions = Vec::new();
    let mut measurements = Vec::new();
    for entry in &manifest.conditions {
        if !seen.insert(entry.label.clone()) {
            return Err(Error::format(
                manifest_path,
                format!("duplicate condition label {:?}", entry.label),
            ));
        }
        let cond = Condition::new(entry.label.clone(), entry.temperature_c)
            .map_err(|e| Error::format(manifest_path, e.to_string()))?;
        if entry.repeats == 0 {
            return Err(Error::format(manifest_path, format!("condition {} has zero repeats", entry.label)));
        }
        let path = base.join(&entry.file);
        let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let expected = entry.repeats * repeat_bytes;
        if raw.len() != expected {
            return Err(Error::format(
                &path,
                format!("length {} bytes, expected {expected} ({} repeats)", raw.len(), entry.repeats),
            ));
        }
        let reps = raw
            .chunks_exact(repeat_bytes)
            .enumerate()
            .map(|(i, chunk)| {
                BitVector::from_bytes_lsb(chunk, manifest.num_cells)
                    .ok_or_else(|| Error::format(&path, format!("nonzero padding bits in repeat {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        conditions.push(cond);
        measurements.push(reps);
    }
    PufDataset::new(manifest.chip_id, manifest.num_cells, conditions, measurements)
        .map_err(|e| Error::format(manifest_path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puf::model::{sample_chip, PopulationParams};

    fn small() -> PufDataset {
        let cells = sample_chip(77, &PopulationParams::default(), 5).unwrap();
        let conds = vec![Condition::at(-15).unwrap(), Condition::at(25).unwrap()];
        PufDataset::simulate("chip-a", &cells, &conds, 3, 5).unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        let ds = small();
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_dataset(&ds, dir.path()).unwrap();
        assert_eq!(load_dataset(&manifest).unwrap(), ds);
    }

    #[test]
    fn raw_file_has_packed_length() {
        let ds = small();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path()).unwrap();
        let raw = fs::read(dir.path().join("01_25C.bin")).unwrap();
        assert_eq!(raw.len(), 3 * 10);
    }

    #[test]
    fn truncated_file_names_the_file() {
        let ds = small();
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_dataset(&ds, dir.path()).unwrap();
        let victim = dir.path().join("00_-15C.bin");
        let mut raw = fs::read(&victim).unwrap();
        raw.pop();
        fs::write(&victim, raw).unwrap();
        match load_dataset(&manifest) {
            Err(Error::Format { path, .. }) => assert_eq!(path, victim),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_labels_and_versions_rejected() {
        let ds = small();
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_dataset(&ds, dir.path()).unwrap();
        let text = fs::read_to_string(&manifest).unwrap();

        let dup = text.replace("\"-15C\"", "\"25C\"");
        fs::write(&manifest, &dup).unwrap();
        assert!(matches!(load_dataset(&manifest), Err(Error::Format { .. })));

        let v2 = text.replace("\"format_version\": 1", "\"format_version\": 2");
        fs::write(&manifest, &v2).unwrap();
        assert!(matches!(load_dataset(&manifest), Err(Error::Format { .. })));
    }

    #[test]
    fn constructor_checks_shapes() {
        let c = vec![Condition::at(25).unwrap()];
        assert!(PufDataset::new("x", 4, c.clone(), vec![vec![BitVector::zeros(5)]]).is_err());
        assert!(PufDataset::new("x", 4, c.clone(), vec![vec![]]).is_err());
        assert!(PufDataset::new("x", 4, c, vec![vec![BitVector::zeros(4)]]).is_ok());
    }
}
