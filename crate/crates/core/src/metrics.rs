//! Gap statistics and binomial confidence intervals.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const WILSON_Z: f64 = 1.959964;

/// Slack below the optimum tolerated as rounding noise.
const GAP_TOL: f64 = 1e-9;

/// `100 (E - opt) / |opt|`.
pub fn gap_percent(energy: f64, opt: f64) -> Result<f64> {
    if opt == 0.0 {
        return Err(Error::ZeroOptimum);
    }
    let scale = opt.abs().max(1.0);
    if energy < opt - GAP_TOL * scale {
        return Err(Error::BelowOptimum { energy, optimum: opt });
    }
    Ok((100.0 * (energy - opt) / opt.abs()).max(0.0))
}

/// Wilson score interval at the given `z`.
pub fn wilson_ci_z(successes: usize, trials: usize, z: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidCounts { successes, trials });
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0)))
}

/// 95% Wilson interval.
pub fn wilson_ci(successes: usize, trials: usize) -> Result<(f64, f64)> {
    wilson_ci_z(successes, trials, WILSON_Z)
}

/// Quantile by linear interpolation between closest ranks, `h = (n - 1) q`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let w = h - lo as f64;
    if w == 0.0 || sorted[hi] == sorted[lo] {
        // also keeps infinite entries from producing NaN
        return sorted[lo];
    }
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n_seeds: usize,
    pub p_below_1pct: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub median_gap: f64,
    pub iqr_lo: f64,
    pub iqr_hi: f64,
    pub mean_gap: f64,
}

/// Summary of a set of gaps; "below" is strict.
pub fn summarize(gaps: &[f64], threshold: f64) -> Result<Metrics> {
    if gaps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = gaps.to_vec();
    sorted.sort_by(f64::total_cmp);
    let hits = gaps.iter().filter(|&&g| g < threshold).count();
    let (lo, hi) = wilson_ci(hits, gaps.len())?;
    Ok(Metrics {
        n_seeds: gaps.len(),
        p_below_1pct: hits as f64 / gaps.len() as f64,
        wilson_lo: lo,
        wilson_hi: hi,
        median_gap: quantile(&sorted, 0.5),
        iqr_lo: quantile(&sorted, 0.25),
        iqr_hi: quantile(&sorted, 0.75),
        mean_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
    })
}
