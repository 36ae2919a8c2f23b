use rand::Rng;
use serde::{Deserialize, Serialize};

use super::device::DeviceGraph;
use super::importance::PairImportance;
use super::Pair;
use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub steps: usize,
    /// Starting temperature; `None` uses the largest pair score.
    pub t0: Option<f64>,
    pub cooling: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            steps: 5000,
            t0: None,
            cooling: 0.995,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relabeling {
    /// `physical[l]` is the device node hosting logical qubit `l`.
    pub physical: Vec<usize>,
    pub score: f64,
    pub identity_score: f64,
    /// Sum of the top-k pair scores, k = native edges inside the subset.
    pub ceiling: f64,
    pub captured_fraction: f64,
    /// Best-so-far score after each step.
    pub best_trace: Vec<f64>,
}

impl Relabeling {
    /// Native edges of the subset in logical indices.
    pub fn logical_edges(&self, dev: &DeviceGraph) -> Vec<Pair> {
        native_slots(dev, &self.physical)
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect()
    }
}

// native edges among subset positions
fn native_slots(dev: &DeviceGraph, subset: &[usize]) -> Vec<Pair> {
    let mut out = Vec::new();
    for a in 0..subset.len() {
        for b in (a + 1)..subset.len() {
            if dev.has_edge(subset[a], subset[b]) {
                out.push((a, b));
            }
        }
    }
    out
}

fn score(imp: &PairImportance, slots: &[Pair], logical_at: &[usize]) -> f64 {
    slots
        .iter()
        .map(|&(a, b)| imp.get(logical_at[a], logical_at[b]))
        .sum()
}

/// Simulated annealing over logical-to-physical placements within `subset`,
/// maximizing the importance carried by native couplings. Moves swap the
/// logical qubits on two subset positions; cooling is geometric.
pub fn anneal_relabel(
    imp: &PairImportance,
    dev: &DeviceGraph,
    subset: &[usize],
    cfg: &AnnealConfig,
    seed: u64,
) -> Result<Relabeling> {
    let n = subset.len();
    if imp.n() != n {
        return Err(Error::InvalidConfig(format!(
            "importance covers {} qubits, subset has {n}",
            imp.n()
        )));
    }
    if let Some(&bad) = subset.iter().find(|&&u| u >= dev.nodes) {
        return Err(Error::SubsetNotInDevice(bad));
    }
    if !(cfg.cooling > 0.0 && cfg.cooling <= 1.0) {
        return Err(Error::InvalidConfig(format!("cooling factor {} not in (0, 1]", cfg.cooling)));
    }
    let slots = native_slots(dev, subset);
    // logical_at[position] = logical qubit placed there
    let mut logical_at: Vec<usize> = (0..n).collect();
    let identity_score = score(imp, &slots, &logical_at);
    let mut cur = identity_score;
    let mut best = cur;
    let mut best_at = logical_at.clone();
    let mut temp = cfg.t0.unwrap_or_else(|| imp.max()).max(1e-12);
    let mut rng = rng::seeded(seed);
    let mut trace = Vec::with_capacity(cfg.steps);

    for _ in 0..cfg.steps {
        if n >= 2 {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            logical_at.swap(a, b);
            let next = score(imp, &slots, &logical_at);
            let delta = next - cur;
            if delta >= 0.0 || rng.random::<f64>() < (delta / temp).exp() {
                cur = next;
                if cur > best {
                    best = cur;
                    best_at.clone_from(&logical_at);
                }
            } else {
                logical_at.swap(a, b);
            }
        }
        trace.push(best);
        temp *= cfg.cooling;
    }

    let mut physical = vec![0; n];
    for (pos, &l) in best_at.iter().enumerate() {
        physical[l] = subset[pos];
    }
    let ceiling = imp.top_k_ceiling(slots.len());
    Ok(Relabeling {
        physical,
        score: best,
        identity_score,
        ceiling,
        captured_fraction: if ceiling > 0.0 { best / ceiling } else { 1.0 },
        best_trace: trace,
    })
}
