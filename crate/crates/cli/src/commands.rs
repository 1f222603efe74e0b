use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use pufkit_core::analytics::{
    block_failure, entropy_report, key_failure_l, montecarlo_failure, plan_code, write_trial_csv, FailureBudget,
    MonteCarloConfig, ResponseSource,
};
use pufkit_core::bch::default_catalog;
use pufkit_core::config::{CALIBRATED_POPULATION, CAMPAIGN_TEMPERATURES_C, DEFAULT_TARGET_PFAIL, KEY_BITS};
use pufkit_core::enrollment::{ber_profile, enroll as build_record, Challenge, ReferenceStrategy};
use pufkit_core::keygen::{
    read_challenge, reference_bits, response_bits_needed, server_recover_ordered, token_generate, AttemptOrder,
    HELPER_MAGIC,
};
use pufkit_core::puf::{
    load_dataset, measure_quality, one_probabilities, power_up, sample_chip, save_dataset, MANIFEST_FILE,
};
use pufkit_core::rng::derive_seed;
use pufkit_core::{
    BchCode, BitVector, CodeParams, Condition, EnrollmentPlan, EnrollmentRecord, HelperData, PufDataset,
};

use crate::config::{required, RunConfig};
use crate::{
    AnalyzeArgs, CliError, EnrollArgs, EnrollFlags, MonteCarloArgs, PlanArgs, ServerArgs, SimulateArgs, StrategyArg,
    TokenArgs,
};

const DEFAULT_SEED: u64 = 1;

/// Prints `v` as pretty JSON, ignoring write errors on stdout.
fn print_json(v: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_code(s: &str) -> Result<BchCode, CliError> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("code {s:?} must be n,k,t")))?;
    match parts[..] {
        [n, k, t] => Ok(BchCode::from_params(CodeParams::new(n, k, t))?),
        _ => Err(CliError::Usage(format!("code {s:?} must be n,k,t"))),
    }
}

fn key_bits(flag: Option<usize>, cfg: &RunConfig) -> Result<usize, CliError> {
    let bits = flag.or(cfg.key_bits).unwrap_or(KEY_BITS);
    if bits != KEY_BITS {
        return Err(CliError::Usage(format!("only {KEY_BITS}-bit keys are supported")));
    }
    Ok(bits)
}

/// Accepts a dataset directory or its manifest file.
fn open_dataset(path: &Path) -> Result<PufDataset, CliError> {
    let manifest = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
    Ok(load_dataset(&manifest)?)
}

fn enrollment_plan(flags: &EnrollFlags) -> Result<EnrollmentPlan, CliError> {
    let mut plan = EnrollmentPlan::single(flags.reference.clone());
    plan.mv_repeats = flags.mv_repeats;
    plan.pair_debias = flags.pair_debias;
    plan.reference_strategy = match flags.strategy {
        StrategyArg::None => ReferenceStrategy::Single,
        StrategyArg::Mv => ReferenceStrategy::MajorityVote(flags.mv_repeats),
        StrategyArg::Presel | StrategyArg::Mrr => ReferenceStrategy::Preselect(flags.presel_repeats),
    };
    match (flags.strategy, flags.others.is_empty()) {
        (StrategyArg::Mrr, true) => return Err(CliError::Usage("--strategy mrr needs --others".into())),
        (StrategyArg::Mrr, false) => plan.other_conditions = flags.others.clone(),
        (_, false) => return Err(CliError::Usage("--others is only valid with --strategy mrr".into())),
        (_, true) => {}
    }
    Ok(plan)
}

pub fn simulate(a: SimulateArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let temps = if a.temps.is_empty() { CAMPAIGN_TEMPERATURES_C.to_vec() } else { a.temps };
    let conditions = temps.iter().map(|&t| Condition::at(t)).collect::<Result<Vec<_>, _>>()?;
    let cells = sample_chip(a.cells, &CALIBRATED_POPULATION, seed)?;
    let chip_id = a.chip_id.unwrap_or_else(|| format!("chip-{seed}"));
    let ds = PufDataset::simulate(chip_id, &cells, &conditions, a.repeats, seed)?;
    let manifest = save_dataset(&ds, &a.out)?;
    let reference = conditions
        .iter()
        .find(|c| c.temperature_c == 25)
        .unwrap_or(&conditions[0])
        .label
        .clone();
    let q = measure_quality(&ds, &reference)?;
    print_json(&json!({
        "manifest": manifest,
        "chip_id": ds.chip_id(),
        "num_cells": ds.num_cells(),
        "conditions": conditions.iter().map(|c| &c.label).collect::<Vec<_>>(),
        "repeats": a.repeats,
        "bias": q.bias,
        "intra_hd": q.intra_hd,
        "intra_hd_condition": reference,
    }));
    Ok(())
}

pub fn enroll(a: EnrollArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let dataset_path = required(a.enroll.dataset.clone(), cfg.dataset.clone(), "dataset")?;
    let ds = open_dataset(&dataset_path)?;
    let plan = enrollment_plan(&a.enroll)?;
    let record = build_record(&ds, &plan)?;

    let labels: Vec<&str> = record.references().iter().map(|r| r.condition_label.as_str()).collect();
    let profile = ber_profile(&record, &plan, &ds, &labels)?;

    record.save(&a.out)?;
    let challenge_path = a
        .challenge
        .or_else(|| cfg.challenge.clone())
        .unwrap_or_else(|| a.out.with_file_name("challenge.json"));
    write_file(&challenge_path, (record.challenge().to_json() + "\n").as_bytes())?;

    let refs: Vec<Value> = record
        .references()
        .iter()
        .enumerate()
        .map(|(j, r)| {
            json!({
                "condition": r.condition_label,
                "strategy": r.strategy,
                "holdout_ber": profile[j][j],
            })
        })
        .collect();
    print_json(&json!({
        "record": a.out,
        "challenge": challenge_path,
        "chip_id": record.chip_id,
        "references": record.len(),
        "mask_size": record.response_len(),
        "per_reference": refs,
    }));
    Ok(())
}

pub fn token(a: TokenArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let challenge_path = required(a.challenge, cfg.challenge.clone(), "challenge")?;
    let text = String::from_utf8(read_file(&challenge_path)?)
        .map_err(|_| CliError::Core(pufkit_core::Error::Protocol("challenge is not UTF-8".into())))?;
    let challenge = Challenge::from_json(&text)?;
    let code = parse_code(&required(a.code, cfg.code.clone(), "code")?)?;
    let key_bits = key_bits(a.key_bits, cfg)?;

    let measurement: BitVector = match (a.dataset.or_else(|| cfg.dataset.clone()), a.chip_seed) {
        (_, Some(chip_seed)) => {
            let cells = sample_chip(challenge.num_cells, &CALIBRATED_POPULATION, chip_seed)?;
            let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            power_up(&cells, &Condition::at(a.temp)?, derive_seed(seed, "token", 0))?
        }
        (Some(path), None) => {
            let ds = open_dataset(&path)?;
            let label = a.condition.ok_or_else(|| CliError::Usage("--condition is required with --dataset".into()))?;
            let reps = ds.repeats(&label)?;
            reps.get(a.repeat)
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("{label} has {} repeats", reps.len())))?
        }
        (None, None) => return Err(CliError::Usage("give --dataset/--condition or --chip-seed".into())),
    };
    let r_prime = read_challenge(&challenge, &measurement)?;
    let out = token_generate(&r_prime, &code, key_bits)?;

    let helper_path = required(a.helper, cfg.helper.clone(), "helper")?;
    write_file(&helper_path, &out.helper.to_bytes())?;
    if let Some(p) = &a.helper_json {
        write_file(p, (out.helper.to_json() + "\n").as_bytes())?;
    }
    if let Some(p) = &a.key_out {
        write_file(p, (out.key.to_hex() + "\n").as_bytes())?;
    }
    print_json(&json!({
        "code": out.helper.code(),
        "blocks": out.helper.blocks().len(),
        "helper": helper_path,
        "helper_bytes": out.helper.to_bytes().len(),
        "key_fingerprint": out.key.fingerprint(),
    }));
    Ok(())
}

fn read_helper(path: &Path) -> Result<HelperData, CliError> {
    let bytes = read_file(path)?;
    if bytes.starts_with(HELPER_MAGIC) {
        Ok(HelperData::from_bytes(&bytes)?)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::Core(pufkit_core::Error::Protocol("helper data: unrecognized encoding".into())))?;
        Ok(HelperData::from_json(&text)?)
    }
}

pub fn server(a: ServerArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let record = EnrollmentRecord::load(&required(a.record, cfg.record.clone(), "record")?)?;
    let helper = read_helper(&required(a.helper, cfg.helper.clone(), "helper")?)?;
    let code = BchCode::from_params(helper.code())
        .map_err(|e| CliError::Core(pufkit_core::Error::Protocol(e.to_string())))?;
    let order = a.temp.map_or(AttemptOrder::Enrollment, AttemptOrder::NearestTo);
    let result = server_recover_ordered(&helper, &record, &code, order)?;
    print_json(&json!({
        "success": result.is_success(),
        "attempts": result.attempts,
        "reference_index": result.reference_index,
        "reference_condition": result.reference_index.map(|j| &record.references()[j].condition_label),
        "key_fingerprint": result.key.as_ref().map(|k| k.fingerprint()),
    }));
    if result.is_success() {
        Ok(())
    } else {
        Err(CliError::Recovery)
    }
}

fn parse_rows(rows: &[String]) -> Result<Vec<Vec<f64>>, CliError> {
    rows.iter()
        .map(|r| {
            r.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad BER value {v:?}"))))
                .collect()
        })
        .collect()
}

pub fn plan(a: PlanArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let target = a.target.or(cfg.target).unwrap_or(DEFAULT_TARGET_PFAIL);
    let key_bits = key_bits(a.key_bits, cfg)?;
    let (profile, rows): (Vec<Vec<f64>>, Vec<String>) = if !a.ber_rows.is_empty() {
        let p = parse_rows(&a.ber_rows)?;
        let names = (0..p.len()).map(|i| format!("row{i}")).collect();
        (p, names)
    } else {
        let path = required(a.enroll.dataset.clone(), cfg.dataset.clone(), "dataset")?;
        let ds = open_dataset(&path)?;
        let plan = enrollment_plan(&a.enroll)?;
        let record = build_record(&ds, &plan)?;
        let eval: Vec<String> = if !a.eval.is_empty() {
            a.eval.clone()
        } else if let Some(c) = &cfg.conditions {
            c.clone()
        } else {
            ds.conditions().iter().map(|c| c.label.clone()).collect()
        };
        let labels: Vec<&str> = eval.iter().map(String::as_str).collect();
        (ber_profile(&record, &plan, &ds, &labels)?, eval)
    };
    match plan_code(target, key_bits, &profile, &default_catalog()) {
        Ok(p) => {
            print_json(&json!({
                "feasible": true,
                "target": target,
                "code": p.code,
                "blocks": p.blocks,
                "worst_condition": rows[p.worst_condition],
                "budget": p.budget,
                "helper_bits": p.helper_bits,
                "token_cost_bitops": p.encode_cost,
                "decoder_cost_bitops": p.decode_cost,
                "token_to_decoder_cost_ratio": p.encode_cost as f64 / p.decode_cost as f64,
                "profile": rows.iter().zip(&profile).map(|(r, b)| json!({"condition": r, "ber": b})).collect::<Vec<_>>(),
            }));
            Ok(())
        }
        Err(pufkit_core::Error::Planning { best_pfail, n, k, t }) => {
            print_json(&json!({
                "feasible": false,
                "target": target,
                "best_code": CodeParams::new(n, k, t),
                "best_pfail": best_pfail,
            }));
            Err(CliError::Core(pufkit_core::Error::Planning { best_pfail, n, k, t }))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn analyze(a: AnalyzeArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let code = parse_code(&required(a.code, cfg.code.clone(), "code")?)?;
    let key_bits = key_bits(a.key_bits, cfg)?;
    let bias = match (a.bias, a.dataset.or_else(|| cfg.dataset.clone())) {
        (Some(b), _) => b,
        (None, Some(path)) => {
            let ds = open_dataset(&path)?;
            let first = ds.conditions()[0].label.clone();
            measure_quality(&ds, &first)?.bias
        }
        (None, None) => return Err(CliError::Usage("give --bias or --dataset".into())),
    };
    let p = code.params();
    let blocks = p.blocks_for(key_bits);
    let report = entropy_report(blocks * p.n, blocks * p.redundancy(), bias, key_bits)?;
    print_json(&json!({ "code": p, "blocks": blocks, "report": report }));
    Ok(())
}

/// Per-reference BER the analytic model predicts for `source`.
fn predicted_ber(
    record: &EnrollmentRecord,
    need: usize,
    source: &ResponseSource<'_>,
) -> Result<Vec<f64>, CliError> {
    let mask = &record.challenge_mask()[..need];
    (0..record.len())
        .map(|j| {
            let reference = reference_bits(record, j)?.slice(0, need);
            Ok(match source {
                ResponseSource::IidFlip { ber, .. } | ResponseSource::CorrelatedFlip { ber, .. } => *ber,
                ResponseSource::Simulated { cells, temperature_c } => {
                    let picked: Vec<_> = mask.iter().map(|&a| cells[a as usize]).collect();
                    let p = one_probabilities(&picked, *temperature_c);
                    p.iter()
                        .zip(reference.iter())
                        .map(|(&p1, bit)| if bit { 1.0 - p1 } else { p1 })
                        .sum::<f64>()
                        / need as f64
                }
                ResponseSource::Dataset { dataset, condition, repeats } => {
                    let reps = &dataset.repeats(condition)?[repeats.clone()];
                    let errors: usize =
                        reps.iter().map(|r| r.select(mask).hamming_distance(&reference)).sum();
                    errors as f64 / (need * reps.len()) as f64
                }
            })
        })
        .collect::<Result<_, pufkit_core::Error>>()
        .map_err(CliError::from)
}

pub fn montecarlo(a: MonteCarloArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let record = EnrollmentRecord::load(&required(a.record, cfg.record.clone(), "record")?)?;
    let code = parse_code(&required(a.code, cfg.code.clone(), "code")?)?;
    let key_bits = key_bits(a.key_bits, cfg)?;
    let trials = a.trials.or(cfg.trials).unwrap_or(1000);
    let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);

    let cells;
    let dataset;
    let label;
    let (source, source_name) = if let Some(ber) = a.ber {
        match a.burst {
            Some(burst) => (
                ResponseSource::CorrelatedFlip { ber, burst, reference: a.reference },
                format!("burst ber={ber} len={burst}"),
            ),
            None => (ResponseSource::IidFlip { ber, reference: a.reference }, format!("iid ber={ber}")),
        }
    } else if let Some(chip_seed) = a.chip_seed {
        cells = sample_chip(record.num_cells, &CALIBRATED_POPULATION, chip_seed)?;
        (
            ResponseSource::Simulated { cells: &cells, temperature_c: a.temp as f64 },
            format!("simulated {}C", a.temp),
        )
    } else if let Some(path) = a.dataset.or_else(|| cfg.dataset.clone()) {
        dataset = open_dataset(&path)?;
        label = a.condition.ok_or_else(|| CliError::Usage("--condition is required with --dataset".into()))?;
        let n = dataset.repeats(&label)?.len();
        (
            ResponseSource::Dataset { dataset: &dataset, condition: &label, repeats: 0..n },
            format!("dataset {label}"),
        )
    } else {
        return Err(CliError::Usage("give --ber, --chip-seed or --dataset".into()));
    };

    let need = response_bits_needed(code.params(), key_bits);
    if record.response_len() < need {
        return Err(CliError::Core(pufkit_core::Error::Parameter(format!(
            "{} needs {need} response bits, record holds {}",
            code.params(),
            record.response_len()
        ))));
    }
    let ber = predicted_ber(&record, need, &source)?;
    let blocks = code.params().blocks_for(key_bits);
    let budget = FailureBudget::compute(code.params(), blocks, &ber)?;

    let mut mc = MonteCarloConfig::new(trials, seed);
    mc.key_bits = key_bits;
    mc.keep_records = a.csv.is_some();
    let report = montecarlo_failure(&record, &code, source, &mc)?;
    if let Some(path) = &a.csv {
        let mut buf = Vec::new();
        write_trial_csv(&mut buf, &source_name, &report.records)
            .map_err(|e| CliError::Usage(format!("csv: {e}")))?;
        write_file(path, &buf)?;
    }
    let single: Vec<f64> = ber
        .iter()
        .map(|&b| key_failure_l(block_failure(code.n(), code.t(), b)?, blocks))
        .collect::<Result<_, _>>()?;
    print_json(&json!({
        "source": source_name,
        "code": code.params(),
        "blocks": blocks,
        "trials": report.trials,
        "failures": report.failures,
        "empirical_pfail": report.failure_rate,
        "wilson_z": report.z,
        "wilson_interval": [report.ci_low, report.ci_high],
        "mean_attempts": report.mean_attempts,
        "analytic_pfail": budget.p_fail,
        "analytic_per_reference": single,
        "predicted_ber": ber,
    }));
    Ok(())
}

