use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::run::ExperimentResults;
use super::sweep::SweepRow;
use crate::oracle::{exact_solve, OracleResult};
use crate::rna::QuboInstance;
use crate::{Error, Result};

/// SHA-256 of the instance's canonical JSON, hex encoded.
pub fn instance_hash(inst: &QuboInstance) -> Result<String> {
    let digest = Sha256::digest(inst.to_json()?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    node_limit: u64,
    result: OracleResult,
}

/// Solves the instance, reusing a cached answer from `cache_dir` when it is
/// proved optimal or was computed with at least the same node budget.
pub fn load_or_solve_oracle(
    inst: &QuboInstance,
    node_limit: u64,
    cache_dir: Option<&Path>,
) -> Result<OracleResult> {
    let Some(dir) = cache_dir else {
        return Ok(exact_solve(inst, node_limit));
    };
    let path = dir.join(format!("{}.json", instance_hash(inst)?));
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(entry) = serde_json::from_str::<CacheEntry>(&text) {
            if entry.result.proved_optimal || entry.node_limit >= node_limit {
                return Ok(entry.result);
            }
        }
    }
    let result = exact_solve(inst, node_limit);
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let entry = CacheEntry {
        node_limit,
        result: result.clone(),
    };
    fs::write(&path, serde_json::to_string_pretty(&entry)?).map_err(|e| Error::io(&path, e))?;
    Ok(result)
}

pub fn write_results(path: &Path, res: &ExperimentResults) -> Result<()> {
    let text = serde_json::to_string_pretty(res)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_summary_csv(path: &Path, res: &ExperimentResults) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "condition", "decoder", "K", "p_below_1pct", "wilson_lo", "wilson_hi", "median_gap",
        "iqr_lo", "iqr_hi", "mean_gap", "n_seeds",
    ])?;
    for row in &res.summary {
        let m = &row.metrics;
        w.write_record([
            row.condition.name().to_string(),
            row.decoder.name().to_string(),
            row.k.to_string(),
            m.p_below_1pct.to_string(),
            m.wilson_lo.to_string(),
            m.wilson_hi.to_string(),
            m.median_gap.to_string(),
            m.iqr_lo.to_string(),
            m.iqr_hi.to_string(),
            m.mean_gap.to_string(),
            m.n_seeds.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_loss_csv(path: &Path, trajectory: &[(usize, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iter", "loss"])?;
    for (i, l) in trajectory {
        w.write_record([i.to_string(), l.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// results.json, summary.csv and one loss CSV per trained seed.
pub fn write_all(dir: &Path, res: &ExperimentResults) -> Result<()> {
    let loss_dir = dir.join("loss");
    fs::create_dir_all(&loss_dir).map_err(|e| Error::io(&loss_dir, e))?;
    write_results(&dir.join("results.json"), res)?;
    write_summary_csv(&dir.join("summary.csv"), res)?;
    for (seed, t) in &res.trainings {
        write_loss_csv(&loss_dir.join(format!("seed{seed}_trained.csv")), &t.loss_trajectory)?;
    }
    Ok(())
}
