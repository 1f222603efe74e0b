//! Reference responses and challenge masks built from repeated
//! measurements: majority voting, reliability preselection, and
//! enrollment of several references under different conditions.
//!
//! Repeat partition: enrollment always consumes the *leading* repeats of
//! each condition it touches (`presel_repeats` or `mv_repeats` of them).
//! Everything after those indices is held out for BER evaluation, see
//! [`EnrollmentPlan::holdout`].

use std::collections::HashSet;
use std::fs;
use std::ops::Range;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::analytics::debias::pair_output_vn_selection;
use crate::bits::BitVector;
use crate::config::{DEFAULT_MV_REPEATS, DEFAULT_PRESEL_REPEATS};
use crate::error::{Error, Result};
use crate::puf::{compute_ber_in, PufDataset};

pub const RECORD_FORMAT_VERSION: u32 = 1;

/// Per-cell majority over an odd number `q` of repeats: a bit is `1` iff
/// at least `ceil(q/2)` repeats read `1`.
pub fn majority_vote(repeats: &[BitVector]) -> Result<BitVector> {
    let q = repeats.len();
    if q == 0 || q % 2 == 0 {
        return Err(Error::param(format!("majority vote needs an odd number of repeats, got {q}")));
    }
    let n = check_lengths(repeats)?;
    let mut counts = vec![0u32; n];
    for r in repeats {
        for i in r.ones_indices() {
            counts[i] += 1;
        }
    }
    let threshold = q.div_ceil(2) as u32;
    Ok(counts.iter().map(|&c| c >= threshold).collect())
}

/// Cells whose value is identical across all `repeats`, with those values.
pub fn preselect(repeats: &[BitVector]) -> Result<(Vec<u32>, BitVector)> {
    if repeats.len() < 2 {
        return Err(Error::param(format!("preselection needs at least 2 repeats, got {}", repeats.len())));
    }
    let n = check_lengths(repeats)?;
    let mut any_diff = vec![0u64; repeats[0].words().len()];
    for r in &repeats[1..] {
        for (acc, (a, b)) in any_diff.iter_mut().zip(r.words().iter().zip(repeats[0].words())) {
            *acc |= a ^ b;
        }
    }
    let mask: Vec<u32> = (0..n)
        .filter(|&i| any_diff[i / 64] >> (i % 64) & 1 == 0)
        .map(|i| i as u32)
        .collect();
    let bits = repeats[0].select(&mask);
    Ok((mask, bits))
}

fn check_lengths(repeats: &[BitVector]) -> Result<usize> {
    let n = repeats[0].len();
    if repeats.iter().any(|r| r.len() != n) {
        return Err(Error::param("repeats have different lengths"));
    }
    Ok(n)
}

/// How a reference response was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// A single measurement.
    None,
    Mv,
    Presel,
    #[serde(rename = "presel+mv")]
    PreselMv,
}

/// Strategy for the reference at the enrollment's main condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "repeats")]
pub enum ReferenceStrategy {
    Single,
    MajorityVote(usize),
    Preselect(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrollmentPlan {
    pub reference_condition: String,
    pub reference_strategy: ReferenceStrategy,
    pub other_conditions: Vec<String>,
    /// Majority-vote repeats for every other condition.
    pub mv_repeats: usize,
    /// Record a pair-output von Neumann selection over the first reference.
    #[serde(default)]
    pub pair_debias: bool,
}

impl EnrollmentPlan {
    /// Preselection at `reference_condition` only.
    pub fn single(reference_condition: impl Into<String>) -> Self {
        EnrollmentPlan {
            reference_condition: reference_condition.into(),
            reference_strategy: ReferenceStrategy::Preselect(DEFAULT_PRESEL_REPEATS),
            other_conditions: Vec::new(),
            mv_repeats: DEFAULT_MV_REPEATS,
            pair_debias: false,
        }
    }

    /// Preselection at `reference_condition` plus majority-voted references
    /// at `others`, restricted to the preselected cells.
    pub fn multi<S: Into<String>>(reference_condition: impl Into<String>, others: impl IntoIterator<Item = S>) -> Self {
        EnrollmentPlan {
            other_conditions: others.into_iter().map(Into::into).collect(),
            ..Self::single(reference_condition)
        }
    }

    /// Number of leading repeats enrollment consumes at `label`.
    pub fn repeats_consumed(&self, label: &str) -> usize {
        if label == self.reference_condition {
            match self.reference_strategy {
                ReferenceStrategy::Single => 1,
                ReferenceStrategy::MajorityVote(q) | ReferenceStrategy::Preselect(q) => q,
            }
        } else if self.other_conditions.iter().any(|c| c == label) {
            self.mv_repeats
        } else {
            0
        }
    }

    /// Repeats at `label` not touched by enrollment.
    pub fn holdout(&self, dataset: &PufDataset, label: &str) -> Result<Range<usize>> {
        let total = dataset.repeats(label)?.len();
        let used = self.repeats_consumed(label);
        if used >= total {
            return Err(Error::param(format!(
                "no held-out repeats at {label}: {total} available, {used} used for enrollment"
            )));
        }
        Ok(used..total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceResponse {
    pub condition_label: String,
    pub temperature_c: i32,
    pub strategy: Strategy,
    /// One bit per challenge-mask address, in address order.
    pub bits: BitVector,
}

/// Optional debiasing selection stored with the record and reused on
/// every protocol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DebiasMeta {
    /// Pairs of masked cells kept by pair-output von Neumann selection.
    pub pair_selection: BitVector,
}

/// Server-side enrollment data of one chip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrollmentRecord {
    pub chip_id: String,
    pub num_cells: usize,
    challenge_mask: Vec<u32>,
    references: Vec<ReferenceResponse>,
    pub debias_meta: Option<DebiasMeta>,
}

impl EnrollmentRecord {
    pub fn new(
        chip_id: impl Into<String>,
        num_cells: usize,
        challenge_mask: Vec<u32>,
        references: Vec<ReferenceResponse>,
        debias_meta: Option<DebiasMeta>,
    ) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::param("an enrollment needs at least one reference"));
        }
        if !challenge_mask.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::param("challenge mask addresses must be strictly increasing"));
        }
        if challenge_mask.last().is_some_and(|&a| a as usize >= num_cells) {
            return Err(Error::param("challenge mask address beyond num_cells"));
        }
        let mut labels = HashSet::new();
        for r in &references {
            if r.bits.len() != challenge_mask.len() {
                return Err(Error::param(format!(
                    "reference {} has {} bits, mask selects {}",
                    r.condition_label,
                    r.bits.len(),
                    challenge_mask.len()
                )));
            }
            if !labels.insert(r.condition_label.as_str()) {
                return Err(Error::param(format!("duplicate reference condition {}", r.condition_label)));
            }
        }
        if let Some(meta) = &debias_meta {
            if meta.pair_selection.len() != challenge_mask.len() / 2 {
                return Err(Error::param("pair selection length must be half the mask size"));
            }
        }
        Ok(EnrollmentRecord {
            chip_id: chip_id.into(),
            num_cells,
            challenge_mask,
            references,
            debias_meta,
        })
    }

    pub fn challenge_mask(&self) -> &[u32] {
        &self.challenge_mask
    }

    pub fn references(&self) -> &[ReferenceResponse] {
        &self.references
    }

    /// Number of references `J`.
    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        self.references.is_empty()
    }

    /// Bits per reference.
    pub fn response_len(&self) -> usize {
        self.challenge_mask.len()
    }

    /// Keeps only the references at `labels`, in that order.
    pub fn restricted_to(&self, labels: &[&str]) -> Result<Self> {
        let refs = labels
            .iter()
            .map(|l| {
                self.references
                    .iter()
                    .find(|r| r.condition_label == *l)
                    .cloned()
                    .ok_or_else(|| Error::Lookup(format!("no reference at {l}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.chip_id.clone(), self.num_cells, self.challenge_mask.clone(), refs, self.debias_meta.clone())
    }

    /// The public part the token stores: which cells to read.
    pub fn challenge(&self) -> Challenge {
        Challenge {
            chip_id: self.chip_id.clone(),
            num_cells: self.num_cells,
            mask: self.challenge_mask.clone(),
            pair_selection: self.debias_meta.as_ref().map(|m| m.pair_selection.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        let wire = RecordWire {
            format_version: RECORD_FORMAT_VERSION,
            chip_id: self.chip_id.clone(),
            num_cells: self.num_cells,
            mask_bitmap: B64.encode(mask_to_bitmap(&self.challenge_mask, self.num_cells).to_bytes_lsb()),
            references: self
                .references
                .iter()
                .map(|r| ReferenceWire {
                    condition_label: r.condition_label.clone(),
                    temperature_c: r.temperature_c,
                    strategy: r.strategy,
                    bits: B64.encode(r.bits.to_bytes_lsb()),
                })
                .collect(),
            debias_meta: self.debias_meta.as_ref().map(|m| DebiasWire {
                scheme: PAIR_VN_SCHEME.to_string(),
                pairs: m.pair_selection.len(),
                selection: B64.encode(m.pair_selection.to_bytes_lsb()),
            }),
        };
        serde_json::to_string_pretty(&wire).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let proto = |m: String| Error::Protocol(format!("enrollment record: {m}"));
        let wire: RecordWire = serde_json::from_str(text).map_err(|e| proto(e.to_string()))?;
        if wire.format_version != RECORD_FORMAT_VERSION {
            return Err(proto(format!("unsupported format_version {}", wire.format_version)));
        }
        let mask = decode_bits(&wire.mask_bitmap, wire.num_cells).map_err(proto)?.ones_indices();
        let mask: Vec<u32> = mask.into_iter().map(|i| i as u32).collect();
        let references = wire
            .references
            .into_iter()
            .map(|r| {
                Ok(ReferenceResponse {
                    bits: decode_bits(&r.bits, mask.len()).map_err(proto)?,
                    condition_label: r.condition_label,
                    temperature_c: r.temperature_c,
                    strategy: r.strategy,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let debias_meta = match wire.debias_meta {
            Some(d) if d.scheme == PAIR_VN_SCHEME => Some(DebiasMeta {
                pair_selection: decode_bits(&d.selection, d.pairs).map_err(proto)?,
            }),
            Some(d) => return Err(proto(format!("unknown debias scheme {:?}", d.scheme))),
            None => None,
        };
        Self::new(wire.chip_id, wire.num_cells, mask, references, debias_meta).map_err(|e| proto(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Cell addresses (and optional reusable debias selection) the token
/// reads. Contains no response bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Challenge {
    pub chip_id: String,
    pub num_cells: usize,
    pub mask: Vec<u32>,
    pub pair_selection: Option<BitVector>,
}

impl Challenge {
    pub fn to_json(&self) -> String {
        let wire = ChallengeWire {
            format_version: RECORD_FORMAT_VERSION,
            chip_id: self.chip_id.clone(),
            num_cells: self.num_cells,
            mask_bitmap: B64.encode(mask_to_bitmap(&self.mask, self.num_cells).to_bytes_lsb()),
            pair_selection: self.pair_selection.as_ref().map(|s| DebiasWire {
                scheme: PAIR_VN_SCHEME.to_string(),
                pairs: s.len(),
                selection: B64.encode(s.to_bytes_lsb()),
            }),
        };
        serde_json::to_string_pretty(&wire).expect("challenge serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let proto = |m: String| Error::Protocol(format!("challenge: {m}"));
        let wire: ChallengeWire = serde_json::from_str(text).map_err(|e| proto(e.to_string()))?;
        if wire.format_version != RECORD_FORMAT_VERSION {
            return Err(proto(format!("unsupported format_version {}", wire.format_version)));
        }
        let mask = decode_bits(&wire.mask_bitmap, wire.num_cells)
            .map_err(proto)?
            .ones_indices()
            .into_iter()
            .map(|i| i as u32)
            .collect();
        let pair_selection = wire
            .pair_selection
            .map(|d| decode_bits(&d.selection, d.pairs).map_err(proto))
            .transpose()?;
        Ok(Challenge {
            chip_id: wire.chip_id,
            num_cells: wire.num_cells,
            mask,
            pair_selection,
        })
    }
}

const PAIR_VN_SCHEME: &str = "pair-output-vn";

#[derive(Serialize, Deserialize)]
struct RecordWire {
    format_version: u32,
    chip_id: String,
    num_cells: usize,
    mask_bitmap: String,
    references: Vec<ReferenceWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    debias_meta: Option<DebiasWire>,
}

#[derive(Serialize, Deserialize)]
struct ReferenceWire {
    condition_label: String,
    temperature_c: i32,
    strategy: Strategy,
    bits: String,
}

#[derive(Serialize, Deserialize)]
struct DebiasWire {
    scheme: String,
    pairs: usize,
    selection: String,
}

#[derive(Serialize, Deserialize)]
struct ChallengeWire {
    format_version: u32,
    chip_id: String,
    num_cells: usize,
    mask_bitmap: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pair_selection: Option<DebiasWire>,
}

fn mask_to_bitmap(mask: &[u32], num_cells: usize) -> BitVector {
    let mut bm = BitVector::zeros(num_cells);
    for &a in mask {
        bm.set(a as usize, true);
    }
    bm
}

fn decode_bits(b64: &str, len: usize) -> std::result::Result<BitVector, String> {
    let bytes = B64.decode(b64).map_err(|e| e.to_string())?;
    BitVector::from_bytes_lsb(&bytes, len).ok_or_else(|| format!("bit field does not hold exactly {len} bits"))
}

/// Builds an enrollment record from `dataset` according to `plan`.
pub fn enroll(dataset: &PufDataset, plan: &EnrollmentPlan) -> Result<EnrollmentRecord> {
    let ref_label = plan.reference_condition.as_str();
    let ref_cond = dataset.condition(ref_label)?.clone();
    let ref_reps = dataset.repeats(ref_label)?;
    let need = plan.repeats_consumed(ref_label);
    if ref_reps.len() < need {
        return Err(Error::param(format!(
            "{ref_label}: {need} repeats required, {} available",
            ref_reps.len()
        )));
    }
    let all_cells = || (0..dataset.num_cells() as u32).collect::<Vec<u32>>();
    let (mask, bits, strategy) = match plan.reference_strategy {
        ReferenceStrategy::Single => (all_cells(), ref_reps[0].clone(), Strategy::None),
        ReferenceStrategy::MajorityVote(q) => (all_cells(), majority_vote(&ref_reps[..q])?, Strategy::Mv),
        ReferenceStrategy::Preselect(i) => {
            let (mask, bits) = preselect(&ref_reps[..i])?;
            (mask, bits, Strategy::Presel)
        }
    };
    if mask.is_empty() {
        return Err(Error::param("preselection kept no cells"));
    }
    let masked = matches!(plan.reference_strategy, ReferenceStrategy::Preselect(_));

    let mut references = vec![ReferenceResponse {
        condition_label: ref_cond.label.clone(),
        temperature_c: ref_cond.temperature_c,
        strategy,
        bits,
    }];
    for label in &plan.other_conditions {
        if label == ref_label {
            return Err(Error::param(format!("{label} listed as both reference and other condition")));
        }
        let cond = dataset.condition(label)?;
        let reps = dataset.repeats(label)?;
        if reps.len() < plan.mv_repeats {
            return Err(Error::param(format!(
                "{label}: {} repeats required, {} available",
                plan.mv_repeats,
                reps.len()
            )));
        }
        let selected: Vec<BitVector> = reps[..plan.mv_repeats].iter().map(|r| r.select(&mask)).collect();
        references.push(ReferenceResponse {
            condition_label: cond.label.clone(),
            temperature_c: cond.temperature_c,
            strategy: if masked { Strategy::PreselMv } else { Strategy::Mv },
            bits: majority_vote(&selected)?,
        });
    }

    let debias_meta = plan.pair_debias.then(|| DebiasMeta {
        pair_selection: pair_output_vn_selection(&references[0].bits),
    });
    EnrollmentRecord::new(dataset.chip_id(), dataset.num_cells(), mask, references, debias_meta)
}

/// BER of every reference of `record` against the held-out repeats of
/// every condition in `eval_conditions`: `result[c][j]`.
pub fn ber_profile(
    record: &EnrollmentRecord,
    plan: &EnrollmentPlan,
    dataset: &PufDataset,
    eval_conditions: &[&str],
) -> Result<Vec<Vec<f64>>> {
    eval_conditions
        .iter()
        .map(|label| {
            let range = plan.holdout(dataset, label)?;
            record
                .references()
                .iter()
                .map(|r| compute_ber_in(&r.bits, record.challenge_mask(), dataset, label, range.clone()))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::Strategy;
    use crate::puf::{sample_chip, Condition, PopulationParams};
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;

    fn bv(s: &str) -> BitVector {
        BitVector::from_bit_str(s).unwrap()
    }

    #[test]
    fn majority_of_three() {
        let out = majority_vote(&[bv("110"), bv("100"), bv("101")]).unwrap();
        assert_eq!(out, bv("100"));
    }

    #[test]
    fn majority_five_of_nine() {
        let mut reps = vec![bv("0"); 9];
        for r in reps.iter_mut().take(5) {
            *r = bv("1");
        }
        assert_eq!(majority_vote(&reps).unwrap(), bv("1"));
        reps[0] = bv("0");
        assert_eq!(majority_vote(&reps).unwrap(), bv("0"));
    }

    #[test]
    fn majority_rejects_even_and_ragged() {
        assert!(majority_vote(&[bv("1"), bv("0")]).is_err());
        assert!(majority_vote(&[]).is_err());
        assert!(majority_vote(&[bv("1"), bv("0"), bv("01")]).is_err());
        assert_eq!(majority_vote(&[bv("1011")]).unwrap(), bv("1011"));
    }

    #[test]
    fn preselect_keeps_agreeing_cells() {
        let (mask, bits) = preselect(&[bv("1100"), bv("1101"), bv("1100")]).unwrap();
        assert_eq!(mask, vec![0, 1, 2]);
        assert_eq!(bits, bv("110"));
        let (mask, _) = preselect(&[bv("1010"), bv("1010")]).unwrap();
        assert_eq!(mask, vec![0, 1, 2, 3]);
        assert!(preselect(&[bv("1")]).is_err());
    }

    fn dataset() -> PufDataset {
        let cells = sample_chip(2048, &PopulationParams::default(), 21).unwrap();
        let conds: Vec<Condition> = [-15, 25, 80].iter().map(|&t| Condition::at(t).unwrap()).collect();
        PufDataset::simulate("chip-21", &cells, &conds, 20, 21).unwrap()
    }

    #[test]
    fn single_and_multi_reference_enrollment() {
        let ds = dataset();
        let single = enroll(&ds, &EnrollmentPlan::single("25C")).unwrap();
        assert_eq!(single.len(), 1);
        let multi = enroll(&ds, &EnrollmentPlan::multi("25C", ["-15C", "80C"])).unwrap();
        assert_eq!(multi.len(), 3);
        let labels: Vec<&str> = multi.references().iter().map(|r| r.condition_label.as_str()).collect();
        assert_eq!(labels, vec!["25C", "-15C", "80C"]);
        assert_eq!(multi.references()[1].strategy, Strategy::PreselMv);
        assert_eq!(enroll(&ds, &EnrollmentPlan::multi("25C", ["-15C", "80C"])).unwrap(), multi);
    }

    #[test]
    fn preselected_bits_have_zero_variance() {
        let ds = dataset();
        let rec = enroll(&ds, &EnrollmentPlan::single("25C")).unwrap();
        for r in &ds.repeats("25C").unwrap()[..DEFAULT_PRESEL_REPEATS] {
            assert_eq!(&r.select(rec.challenge_mask()), &rec.references()[0].bits);
        }
    }

    #[test]
    fn insufficient_repeats_rejected() {
        let ds = dataset();
        let mut plan = EnrollmentPlan::multi("25C", ["80C"]);
        plan.mv_repeats = 21;
        assert!(matches!(enroll(&ds, &plan), Err(Error::Parameter(_))));
        let plan = EnrollmentPlan::multi("25C", ["0C"]);
        assert!(matches!(enroll(&ds, &plan), Err(Error::Lookup(_))));
    }

    #[test]
    fn record_json_round_trip() {
        let ds = dataset();
        let mut plan = EnrollmentPlan::multi("25C", ["-15C", "80C"]);
        plan.pair_debias = true;
        let rec = enroll(&ds, &plan).unwrap();
        assert!(rec.debias_meta.is_some());
        assert_eq!(EnrollmentRecord::from_json(&rec.to_json()).unwrap(), rec);
        let ch = rec.challenge();
        assert_eq!(Challenge::from_json(&ch.to_json()).unwrap(), ch);
    }

    #[test]
    fn record_validation() {
        let r = |l: &str, n| ReferenceResponse {
            condition_label: l.into(),
            temperature_c: 25,
            strategy: Strategy::Presel,
            bits: BitVector::zeros(n),
        };
        assert!(EnrollmentRecord::new("c", 8, vec![0, 2], vec![], None).is_err());
        assert!(EnrollmentRecord::new("c", 8, vec![2, 0], vec![r("a", 2)], None).is_err());
        assert!(EnrollmentRecord::new("c", 8, vec![0, 8], vec![r("a", 2)], None).is_err());
        assert!(EnrollmentRecord::new("c", 8, vec![0, 2], vec![r("a", 2), r("a", 2)], None).is_err());
        assert!(EnrollmentRecord::new("c", 8, vec![0, 2], vec![r("a", 2), r("b", 3)], None).is_err());
        assert!(EnrollmentRecord::new("c", 8, vec![0, 2], vec![r("a", 2), r("b", 2)], None).is_ok());
    }

    #[test]
    fn holdout_excludes_enrollment_repeats() {
        let ds = dataset();
        let plan = EnrollmentPlan::multi("25C", ["80C"]);
        assert_eq!(plan.holdout(&ds, "25C").unwrap(), 10..20);
        assert_eq!(plan.holdout(&ds, "80C").unwrap(), 9..20);
        assert_eq!(plan.holdout(&ds, "-15C").unwrap(), 0..20);
    }

    proptest! {
        #[test]
        fn majority_is_permutation_invariant(rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 16), 5),
                                             perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle()) {
            let reps: Vec<BitVector> = rows.into_iter().map(BitVector::from_bools).collect();
            let shuffled: Vec<BitVector> = perm.iter().map(|&i| reps[i].clone()).collect();
            prop_assert_eq!(majority_vote(&reps).unwrap(), majority_vote(&shuffled).unwrap());
            let same = vec![reps[0].clone(); 3];
            prop_assert_eq!(majority_vote(&same).unwrap(), reps[0].clone());
        }
    }
}
