use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::manifest::ExperimentManifest;
use super::output::load_or_solve_oracle;
use super::run::{run_prepared, ExperimentResults};
use crate::ansatz::Topology;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "snake_case")]
pub enum SweepAxis {
    P(Vec<usize>),
    K(Vec<usize>),
    Topology(Vec<Topology>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::P(_) => "p",
            SweepAxis::K(_) => "K",
            SweepAxis::Topology(_) => "topology",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub condition: String,
    pub decoder: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub p_below_1pct: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub median_gap: f64,
    pub iqr_lo: f64,
    pub iqr_hi: f64,
    pub mean_gap: f64,
    /// Median gap rescaled to [0, 1] over the axis values of its series.
    pub normalized_gap: f64,
    /// Axis value with the smallest median gap in its series.
    pub is_min: bool,
}

/// One summary row per axis value (and condition, decoder, K). Every value
/// shares the instance and oracle.
pub fn sweep(base: &ExperimentManifest, axis: &SweepAxis) -> Result<(Vec<SweepRow>, Vec<ExperimentResults>)> {
    let variants: Vec<(String, ExperimentManifest)> = match axis {
        SweepAxis::P(ps) => ps
            .iter()
            .map(|&p| (p.to_string(), ExperimentManifest { depth: Some(p), ..base.clone() }))
            .collect(),
        SweepAxis::K(ks) => vec![(
            String::new(),
            ExperimentManifest {
                k_list: ks.clone(),
                ..base.clone()
            },
        )],
        SweepAxis::Topology(ts) => ts
            .iter()
            .map(|&t| (t.name().to_string(), ExperimentManifest { topology: t, ..base.clone() }))
            .collect(),
    };
    if variants.is_empty() || matches!(axis, SweepAxis::K(k) if k.is_empty()) {
        return Err(Error::InvalidConfig("sweep axis has no values".into()));
    }
    let inst = base.build_instance()?;
    let cache = base.out.as_ref().map(|d| d.join("oracle_cache"));
    let oracle = load_or_solve_oracle(&inst, base.node_limit, cache.as_deref())?;

    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (value, man) in variants {
        let prep = man.prepare_instance(inst.clone())?;
        let res = run_prepared(&prep, &man, oracle.clone())?;
        for s in &res.summary {
            let v = if value.is_empty() { s.k.to_string() } else { value.clone() };
            rows.push(SweepRow {
                axis: axis.name().to_string(),
                value: v,
                condition: s.condition.name().to_string(),
                decoder: s.decoder.name().to_string(),
                k: s.k,
                p_below_1pct: s.metrics.p_below_1pct,
                wilson_lo: s.metrics.wilson_lo,
                wilson_hi: s.metrics.wilson_hi,
                median_gap: s.metrics.median_gap,
                iqr_lo: s.metrics.iqr_lo,
                iqr_hi: s.metrics.iqr_hi,
                mean_gap: s.metrics.mean_gap,
                normalized_gap: 0.0,
                is_min: false,
            });
        }
        results.push(res);
    }
    normalize(&mut rows, matches!(axis, SweepAxis::K(_)));
    Ok((rows, results))
}

fn normalize(rows: &mut [SweepRow], k_axis: bool) {
    // series: same condition and decoder, and same K unless K is the axis
    let mut series: BTreeMap<(String, String, usize), Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        let k = if k_axis { 0 } else { r.k };
        series
            .entry((r.condition.clone(), r.decoder.clone(), k))
            .or_default()
            .push(i);
    }
    for idx in series.values() {
        let finite: Vec<f64> = idx
            .iter()
            .map(|&i| rows[i].median_gap)
            .filter(|g| g.is_finite())
            .collect();
        let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut min_marked = false;
        for &i in idx {
            let g = rows[i].median_gap;
            rows[i].normalized_gap = if !g.is_finite() {
                1.0
            } else if hi > lo {
                (g - lo) / (hi - lo)
            } else {
                0.0
            };
            if g == lo && !min_marked {
                rows[i].is_min = true;
                min_marked = true;
            }
        }
    }
}
