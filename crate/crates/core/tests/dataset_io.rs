use std::fs;

use pufkit_core::config::CALIBRATED_POPULATION;
use pufkit_core::enrollment::{enroll, EnrollmentPlan};
use pufkit_core::puf::{load_dataset, measure_quality, sample_chip, save_dataset, MANIFEST_FILE};
use pufkit_core::{Condition, EnrollmentRecord, Error, PufDataset};
use tempfile::TempDir;

fn small_dataset() -> PufDataset {
    let cells = sample_chip(1001, &CALIBRATED_POPULATION, 9).unwrap();
    let conds: Vec<Condition> = [-15, 25, 80].iter().map(|&t| Condition::at(t).unwrap()).collect();
    PufDataset::simulate("io", &cells, &conds, 12, 9).unwrap()
}

#[test]
fn save_load_round_trip() {
    let dir = TempDir::new().unwrap();
    let ds = small_dataset();
    let manifest = save_dataset(&ds, dir.path()).unwrap();
    assert_eq!(manifest, dir.path().join(MANIFEST_FILE));
    let back = load_dataset(&manifest).unwrap();
    assert_eq!(back, ds);
    let raw = fs::read(dir.path().join("00_-15C.bin")).unwrap();
    assert_eq!(raw.len(), 12 * 1001usize.div_ceil(8));
}

#[test]
fn truncated_raw_file_names_the_file() {
    let dir = TempDir::new().unwrap();
    let manifest = save_dataset(&small_dataset(), dir.path()).unwrap();
    let raw = dir.path().join("01_25C.bin");
    let bytes = fs::read(&raw).unwrap();
    fs::write(&raw, &bytes[..bytes.len() - 1]).unwrap();
    match load_dataset(&manifest) {
        Err(Error::Format { path, reason }) => assert!(path.ends_with("01_25C.bin") || reason.contains("01_25C.bin")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn manifest_errors() {
    let dir = TempDir::new().unwrap();
    let manifest = save_dataset(&small_dataset(), dir.path()).unwrap();
    let text = fs::read_to_string(&manifest).unwrap();

    fs::write(&manifest, text.replace("\"label\": \"80C\"", "\"label\": \"25C\"")).unwrap();
    assert!(matches!(load_dataset(&manifest), Err(Error::Format { .. })));

    fs::write(&manifest, text.replace("\"format_version\": 1", "\"format_version\": 7")).unwrap();
    assert!(matches!(load_dataset(&manifest), Err(Error::Format { .. })));
}

#[test]
fn record_json_round_trip_and_public_challenge() {
    let dir = TempDir::new().unwrap();
    let ds = small_dataset();
    let mut plan = EnrollmentPlan::multi("25C", ["-15C", "80C"]);
    plan.pair_debias = true;
    let record = enroll(&ds, &plan).unwrap();
    let path = dir.path().join("record.json");
    record.save(&path).unwrap();
    assert_eq!(EnrollmentRecord::load(&path).unwrap(), record);

    let challenge = record.challenge().to_json();
    for r in record.references() {
        let b64 = base64_of(&r.bits.to_bytes_lsb());
        assert!(!challenge.contains(&b64));
    }
    assert!(matches!(EnrollmentRecord::from_json("{}"), Err(Error::Protocol(_))));
}

fn base64_of(bytes: &[u8]) -> String {
    use base64::Engine;
    base64::engine::general_purpose::STANDARD.encode(bytes)
}

#[test]
fn quality_of_calibrated_population() {
    let cells = sample_chip(16_384, &CALIBRATED_POPULATION, 17).unwrap();
    let conds = [Condition::at(25).unwrap()];
    let ds = PufDataset::simulate("q", &cells, &conds, 20, 17).unwrap();
    let q = measure_quality(&ds, "25C").unwrap();
    assert!((0.47..=0.53).contains(&q.bias), "{}", q.bias);
    assert!(q.intra_hd > 0.0 && q.intra_hd < 0.1);
    assert!(q.per_cell_flip_prob.iter().all(|p| (0.0..=1.0).contains(p)));
}
