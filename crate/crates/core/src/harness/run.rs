use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{Condition, DecoderKind, ExperimentManifest, Prepared};
use crate::decode::{best_of_k_curve, pagd_restarts, random_evs, sign_ls, sign_round, DecodeParams};
use crate::metrics::{gap_percent, summarize, Metrics};
use crate::oracle::OracleResult;
use crate::rna::{bits_to_string, Bits};
use crate::train::{train, TrainConfig, TrainedResult};
use crate::{rng, Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// What gaps are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    Oracle,
    /// Oracle ran out of nodes; best known energy is used instead.
    Incumbent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub condition: Condition,
    pub decoder: DecoderKind,
    /// Restart budget for PAGD; 1 for the sign decoders.
    pub k: usize,
    pub bits: String,
    pub energy: f64,
    pub gap: Option<f64>,
    pub feasible: bool,
    pub restart: usize,
    pub loss_trajectory: Option<String>,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub condition: Condition,
    pub decoder: DecoderKind,
    pub k: usize,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub id: String,
    pub length: Option<usize>,
    pub m: usize,
    pub conflicts: usize,
    pub n: usize,
    pub p: usize,
    pub pairs_per_layer: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub schema_version: u32,
    pub manifest: ExperimentManifest,
    pub instance: InstanceSummary,
    pub reference: Reference,
    pub reference_energy: f64,
    pub oracle: OracleResult,
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    /// Per-seed training outcome, trained condition only.
    #[serde(skip)]
    pub trainings: Vec<(u64, TrainedResult)>,
}

struct Cell {
    seed: u64,
    records: Vec<RunRecord>,
    training: Option<TrainedResult>,
}

fn cell(prep: &Prepared, man: &ExperimentManifest, seed: u64, condition: Condition) -> Result<Cell> {
    let start = Instant::now();
    let inst = &prep.inst;
    let cfg = TrainConfig {
        alpha: man.alpha,
        max_iters: if condition == Condition::Trained { man.iters } else { 0 },
        seed,
        optimizer: man.optimizer,
        loss: man.loss,
        shots: man.shots,
        ..Default::default()
    };
    let (evs, training) = match condition {
        Condition::RandomEv => (
            random_evs(inst.m(), rng::derive_seed(seed, condition.name())).values,
            None,
        ),
        _ => {
            let t = train(&prep.circuit, &prep.enc, inst, &cfg)?;
            (t.final_evs.values.clone(), (condition == Condition::Trained).then_some(t))
        }
    };
    let loss_ref = training
        .as_ref()
        .map(|_| format!("loss/seed{seed}_{}.csv", condition.name()));
    let prior_ms = start.elapsed().as_millis() as u64;
    let mut records = Vec::new();
    let record = |decoder, k, bits: &Bits, energy, feasible, restart, t0: Instant| RunRecord {
        seed,
        condition,
        decoder,
        k,
        bits: bits_to_string(bits),
        energy,
        gap: None,
        feasible,
        restart,
        loss_trajectory: loss_ref.clone(),
        wall_time_ms: prior_ms + t0.elapsed().as_millis() as u64,
    };
    for &dec in &man.decoders {
        let t0 = Instant::now();
        match dec {
            DecoderKind::Sign => {
                let bits = sign_round(&evs);
                let e = inst.energy(&bits)?;
                let f = inst.is_feasible(&bits)?;
                records.push(record(dec, 1, &bits, e, f, 0, t0));
            }
            DecoderKind::SignLs => {
                let r = sign_ls(&evs, inst, man.t_ls)?;
                records.push(record(dec, 1, &r.bits, r.energy, r.feasible, 0, t0));
            }
            DecoderKind::Pagd => {
                let params = DecodeParams {
                    alpha: man.alpha,
                    beta: man.beta,
                    sigma_noise: man.sigma_noise,
                    k: man.max_k(),
                    t_ls: man.t_ls,
                    seed: rng::derive_seed(seed, &format!("pagd/{}", condition.name())),
                };
                let all = pagd_restarts(&evs, inst, &params)?;
                let mut ks = man.k_list.clone();
                ks.sort_unstable();
                ks.dedup();
                for (k, best) in ks.iter().zip(best_of_k_curve(&all, &ks)) {
                    let b = best.expect("K >= 1");
                    records.push(record(dec, *k, &b.bits, b.energy, b.feasible, b.restart, t0));
                }
            }
        }
    }
    Ok(Cell {
        seed,
        records,
        training,
    })
}

/// Runs every (seed, condition) cell, decodes, and scores against the oracle.
pub fn run_prepared(
    prep: &Prepared,
    man: &ExperimentManifest,
    oracle: OracleResult,
) -> Result<ExperimentResults> {
    man.validate()?;
    let jobs: Vec<(u64, Condition)> = man
        .seeds
        .iter()
        .flat_map(|&s| man.conditions.iter().map(move |&c| (s, c)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(man.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let cells: Vec<Cell> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, c)| cell(prep, man, s, c))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut records: Vec<RunRecord> = Vec::new();
    let mut trainings = Vec::new();
    for c in cells {
        records.extend(c.records);
        if let Some(t) = c.training {
            trainings.push((c.seed, t));
        }
    }

    let (reference, reference_energy) = if oracle.proved_optimal {
        (Reference::Oracle, oracle.energy)
    } else {
        let best_decoded = records
            .iter()
            .filter(|r| r.feasible)
            .map(|r| r.energy)
            .fold(oracle.energy, f64::min);
        (Reference::Incumbent, best_decoded)
    };
    for r in &mut records {
        r.gap = match gap_percent(r.energy, reference_energy) {
            Ok(g) => Some(g),
            Err(Error::BelowOptimum { .. }) if !r.feasible => None,
            Err(Error::ZeroOptimum) => None,
            Err(e) => return Err(e),
        };
    }

    let mut groups: BTreeMap<(Condition, DecoderKind, usize), Vec<f64>> = BTreeMap::new();
    for r in &records {
        // infeasible decodes count as misses with an unbounded gap
        let g = r.gap.filter(|_| r.feasible).unwrap_or(f64::INFINITY);
        groups.entry((r.condition, r.decoder, r.k)).or_default().push(g);
    }
    let summary = groups
        .into_iter()
        .map(|((condition, decoder, k), gaps)| {
            Ok(SummaryRow {
                condition,
                decoder,
                k,
                metrics: summarize(&gaps, 1.0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let inst = &prep.inst;
    Ok(ExperimentResults {
        schema_version: SCHEMA_VERSION,
        manifest: man.clone(),
        instance: InstanceSummary {
            id: inst.sequence_id().to_string(),
            length: inst.sequence().map(str::len),
            m: inst.m(),
            conflicts: inst.relations().conflicts.len(),
            n: prep.enc.n,
            p: prep.circuit.p,
            pairs_per_layer: prep.circuit.layers[0].pairs.len(),
        },
        reference,
        reference_energy,
        oracle,
        records,
        summary,
        trainings,
    })
}

/// Full experiment: prepare, solve (or load) the oracle, run, and write
/// outputs when the manifest names a directory.
pub fn run_experiment(man: &ExperimentManifest) -> Result<ExperimentResults> {
    let prep = man.prepare()?;
    let cache = man.out.as_ref().map(|d| d.join("oracle_cache"));
    let oracle = super::output::load_or_solve_oracle(&prep.inst, man.node_limit, cache.as_deref())?;
    let res = run_prepared(&prep, man, oracle)?;
    if let Some(dir) = &man.out {
        super::output::write_all(dir, &res)?;
    }
    Ok(res)
}

/// Number of (seed, condition) series whose best-of-K energy ever rises
/// with K.
pub fn best_of_k_violations(records: &[RunRecord]) -> usize {
    let mut series: BTreeMap<(u64, Condition), Vec<(usize, f64)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.decoder == DecoderKind::Pagd) {
        series.entry((r.seed, r.condition)).or_default().push((r.k, r.energy));
    }
    series
        .into_values()
        .filter(|s| {
            let mut s = s.clone();
            s.sort_by_key(|t| t.0);
            s.windows(2).any(|w| w[1].1 > w[0].1)
        })
        .count()
}
