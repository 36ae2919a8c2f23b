//! Decoders from expectation values to bitstrings.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rna::{Bits, QuboInstance};
use crate::sim::EvVector;
use crate::train::logistic;
use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma_noise: f64,
    pub k: usize,
    pub t_ls: usize,
    pub seed: u64,
}

impl Default for DecodeParams {
    fn default() -> Self {
        DecodeParams {
            alpha: 8.0,
            beta: 1.0,
            sigma_noise: 0.2,
            k: 1,
            t_ls: 3,
            seed: 0,
        }
    }
}

impl DecodeParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, value: f64| Error::InvalidConfig(format!("{name} = {value} out of range"));
        if !(self.alpha > 0.0) {
            return Err(bad("alpha", self.alpha));
        }
        if !(self.beta >= 0.0) {
            return Err(bad("beta", self.beta));
        }
        if !(self.sigma_noise >= 0.0) {
            return Err(bad("sigma_noise", self.sigma_noise));
        }
        if self.k == 0 {
            return Err(bad("K", 0.0));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    #[serde(with = "crate::rna::bitstring_serde")]
    pub bits: Bits,
    pub energy: f64,
    pub feasible: bool,
    pub restarts_used: usize,
    /// Restart that produced this result (0 for single-shot decoders).
    pub restart: usize,
    pub commits: Vec<usize>,
}

fn check_len(evs: &[f64], inst: &QuboInstance) -> Result<()> {
    if evs.len() != inst.m() {
        return Err(Error::LengthMismatch {
            expected: inst.m(),
            found: evs.len(),
        });
    }
    Ok(())
}

fn finish(inst: &QuboInstance, bits: Bits, commits: Vec<usize>) -> Result<DecodeResult> {
    Ok(DecodeResult {
        energy: inst.energy(&bits)?,
        feasible: inst.is_feasible(&bits)?,
        bits,
        restarts_used: 1,
        restart: 0,
        commits,
    })
}

/// `x_i = 1` iff `e_i < 0`.
pub fn sign_round(evs: &[f64]) -> Bits {
    evs.iter().map(|&e| e < 0.0).collect()
}

// energy change of turning bit i off, given it is on
fn removal_gain(inst: &QuboInstance, i: usize, x: &[bool]) -> f64 {
    -inst.marginal(i, x)
}

/// Clears bits involved in violated conflicts until the string is feasible,
/// always dropping the bit whose removal lowers the energy most.
pub fn repair(inst: &QuboInstance, x: &mut [bool]) {
    loop {
        let mut involved = vec![false; x.len()];
        for &(a, b) in &inst.relations().conflicts {
            if x[a] && x[b] {
                involved[a] = true;
                involved[b] = true;
            }
        }
        let mut pick: Option<(usize, f64)> = None;
        for i in (0..x.len()).filter(|&i| involved[i]) {
            let g = removal_gain(inst, i, x);
            if pick.is_none_or(|(_, best)| g < best) {
                pick = Some((i, g));
            }
        }
        match pick {
            Some((i, _)) => x[i] = false,
            None => return,
        }
    }
}

/// Sign rounding, repair, then up to `t` first-improvement passes of
/// feasibility-preserving single-bit flips in index order.
pub fn sign_ls(evs: &[f64], inst: &QuboInstance, t: usize) -> Result<DecodeResult> {
    check_len(evs, inst)?;
    let mut x = sign_round(evs);
    repair(inst, &mut x);
    let adj = inst.relations().conflict_adjacency(inst.m());
    for _ in 0..t {
        let mut flipped = false;
        for i in 0..x.len() {
            let change = if x[i] {
                removal_gain(inst, i, &x)
            } else {
                if adj[i].iter().any(|&j| x[j]) {
                    continue;
                }
                inst.marginal(i, &x)
            };
            if change < 0.0 {
                x[i] = !x[i];
                flipped = true;
            }
        }
        if !flipped {
            break;
        }
    }
    finish(inst, x, Vec::new())
}

/// Prior-aware greedy descent: repeatedly commit the active variable with
/// the best `(-delta) * xtilde^beta` among those with negative marginal
/// `delta`, then deactivate it and its conflicts.
pub fn pagd(evs: &[f64], inst: &QuboInstance, alpha: f64, beta: f64) -> Result<DecodeResult> {
    check_len(evs, inst)?;
    let m = inst.m();
    let prior: Vec<f64> = evs
        .iter()
        .map(|&e| logistic(-alpha * e).powf(beta))
        .collect();
    let mut delta: Vec<f64> = (0..m).map(|i| inst.get(i, i)).collect();
    let mut active = vec![true; m];
    let mut x = vec![false; m];
    let mut commits = Vec::new();
    loop {
        let mut pick: Option<(usize, f64)> = None;
        for i in 0..m {
            if !active[i] || delta[i] >= 0.0 {
                continue;
            }
            let score = -delta[i] * prior[i];
            if pick.is_none_or(|(_, s)| score > s) {
                pick = Some((i, score));
            }
        }
        let Some((i, _)) = pick else { break };
        x[i] = true;
        active[i] = false;
        commits.push(i);
        for &j in inst.conflicts_of(i) {
            active[j] = false;
        }
        let row = inst.row(i);
        for j in 0..m {
            if active[j] {
                delta[j] += 2.0 * row[j];
            }
        }
    }
    finish(inst, x, commits)
}

/// All `params.k` PAGD restarts in order. Restart 0 decodes `evs` as given;
/// restart `k` adds Gaussian noise from its own stream of `params.seed`, so
/// the first `K` restarts are the same for every larger `K`.
pub fn pagd_restarts(evs: &[f64], inst: &QuboInstance, params: &DecodeParams) -> Result<Vec<DecodeResult>> {
    params.validate()?;
    check_len(evs, inst)?;
    let noise = Normal::new(0.0, params.sigma_noise)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut out = Vec::with_capacity(params.k);
    for k in 0..params.k {
        let mut r = pagd(&perturbed(evs, &noise, params, k), inst, params.alpha, params.beta)?;
        r.restart = k;
        out.push(r);
    }
    Ok(out)
}

fn perturbed(evs: &[f64], noise: &Normal<f64>, params: &DecodeParams, k: usize) -> Vec<f64> {
    if k == 0 || params.sigma_noise == 0.0 {
        return evs.to_vec();
    }
    let mut r = rng::stream(params.seed, k as u64);
    evs.iter().map(|&e| e + noise.sample(&mut r)).collect()
}

/// Lowest energy among `results`, earliest restart on ties.
pub fn best_of(results: &[DecodeResult]) -> Option<DecodeResult> {
    let mut best: Option<&DecodeResult> = None;
    for r in results {
        if best.is_none_or(|b| r.energy < b.energy) {
            best = Some(r);
        }
    }
    best.map(|b| DecodeResult {
        restarts_used: results.len(),
        ..b.clone()
    })
}

/// Best-of-K PAGD.
pub fn pagd_k(evs: &[f64], inst: &QuboInstance, params: &DecodeParams) -> Result<DecodeResult> {
    let all = pagd_restarts(evs, inst, params)?;
    Ok(best_of(&all).expect("K >= 1"))
}

/// Best-of-K energies for every K in `ks`, taken from one restart sequence.
pub fn best_of_k_curve(results: &[DecodeResult], ks: &[usize]) -> Vec<Option<DecodeResult>> {
    ks.iter()
        .map(|&k| best_of(&results[..k.min(results.len())]))
        .collect()
}

/// I.i.d. `U[-1, 1]` expectation values.
pub fn random_evs(m: usize, seed: u64) -> EvVector {
    let mut r = rng::seeded(seed);
    EvVector::exact((0..m).map(|_| r.random_range(-1.0..=1.0)).collect())
}
