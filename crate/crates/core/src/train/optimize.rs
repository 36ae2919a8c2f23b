use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    TrustRegionLinear,
    NelderMead,
}

impl std::str::FromStr for Optimizer {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "trust_region_linear" | "trust_region" | "cobyla" => Ok(Optimizer::TrustRegionLinear),
            "nelder_mead" | "nm" => Ok(Optimizer::NelderMead),
            other => Err(crate::Error::InvalidConfig(format!("unknown optimizer {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustRegion {
    pub rho_begin: f64,
    pub rho_end: f64,
}

impl Default for TrustRegion {
    fn default() -> Self {
        TrustRegion {
            rho_begin: 0.5,
            rho_end: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    /// `(evaluation index, value)` for every objective call, in order.
    pub trajectory: Vec<(usize, f64)>,
}

struct Counter<'a, F> {
    f: &'a mut F,
    budget: usize,
    trajectory: Vec<(usize, f64)>,
    best: Option<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Counter<'_, F> {
    fn left(&self) -> usize {
        self.budget - self.trajectory.len()
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        self.trajectory.push((self.trajectory.len(), v));
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((x.to_vec(), v));
        }
        v
    }

    fn finish(self, x0: &[f64]) -> Minimum {
        let (x, f) = self.best.unwrap_or_else(|| (x0.to_vec(), f64::INFINITY));
        Minimum {
            x,
            f,
            trajectory: self.trajectory,
        }
    }
}

/// Derivative-free minimization of `f` from `x0` using at most `budget`
/// evaluations. The returned point is the best one evaluated, so it is never
/// worse than `x0`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    budget: usize,
    seed: u64,
    method: Optimizer,
) -> Minimum {
    let mut c = Counter {
        f: &mut f,
        budget,
        trajectory: Vec::with_capacity(budget),
        best: None,
    };
    if budget > 0 {
        match method {
            Optimizer::TrustRegionLinear => trust_region(&mut c, x0, TrustRegion::default()),
            Optimizer::NelderMead => nelder_mead(&mut c, x0, seed),
        }
    }
    c.finish(x0)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn argmin(v: &[f64]) -> usize {
    let mut k = 0;
    for i in 1..v.len() {
        if v[i] < v[k] {
            k = i;
        }
    }
    k
}

/// Displacements of every vertex except `skip` from vertex `b`, as rows.
fn displacement(pts: &[Vec<f64>], b: usize, skip: Option<usize>) -> DMatrix<f64> {
    let n = pts[0].len();
    let rows: Vec<usize> = (0..pts.len()).filter(|&k| k != b && Some(k) != skip).collect();
    DMatrix::from_fn(rows.len(), n, |r, c| pts[rows[r]][c] - pts[b][c])
}

/// Unit direction orthogonal (as far as possible) to the rows of `d`.
fn fresh_direction(d: &DMatrix<f64>, n: usize) -> Vec<f64> {
    if d.nrows() == 0 {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        return v;
    }
    // smallest right singular vector of the padded square matrix
    let mut sq = DMatrix::zeros(n, n);
    sq.view_mut((0, 0), (d.nrows(), n)).copy_from(d);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let k = (0..n)
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .unwrap();
    vt.row(k).iter().copied().collect()
}

/// Linear-interpolation trust region over `n + 1` points. Each iteration
/// fits a plane through the current simplex and steps `rho` down its slope;
/// failed steps either repair the simplex geometry or halve `rho`.
fn trust_region<F: FnMut(&[f64]) -> f64>(c: &mut Counter<F>, x0: &[f64], tr: TrustRegion) {
    let n = x0.len();
    let mut rho = tr.rho_begin;
    let mut pts = vec![x0.to_vec()];
    let mut vals = vec![c.eval(x0)];
    if n == 0 {
        return;
    }
    for i in 0..n {
        if c.left() == 0 {
            return;
        }
        let mut x = x0.to_vec();
        x[i] += rho;
        vals.push(c.eval(&x));
        pts.push(x);
    }

    while c.left() > 0 {
        let b = argmin(&vals);
        let far = (0..=n)
            .filter(|&k| k != b)
            .max_by(|&p, &q| dist(&pts[p], &pts[b]).total_cmp(&dist(&pts[q], &pts[b])))
            .unwrap();
        let d = displacement(&pts, b, None);
        let df = DVector::from_iterator(n, (0..=n).filter(|&k| k != b).map(|k| vals[k] - vals[b]));
        let svals = d.clone().svd(false, false).singular_values;
        let smin = svals.iter().copied().fold(f64::INFINITY, f64::min);
        if smin < 1e-2 * rho || !df.iter().all(|v| v.is_finite()) {
            // degenerate simplex: swap the far vertex for a spanning one
            let rest = displacement(&pts, b, Some(far));
            let dir = fresh_direction(&rest, n);
            let x: Vec<f64> = pts[b].iter().zip(&dir).map(|(p, d)| p + rho * d).collect();
            vals[far] = c.eval(&x);
            pts[far] = x;
            continue;
        }
        let Some(g) = d.lu().solve(&df) else {
            rho /= 2.0;
            continue;
        };
        let gnorm = g.norm();
        if gnorm < 1e-14 {
            if rho <= tr.rho_end {
                return;
            }
            rho = (rho / 2.0).max(tr.rho_end);
            continue;
        }
        let trial: Vec<f64> = pts[b].iter().zip(g.iter()).map(|(p, gi)| p - rho * gi / gnorm).collect();
        let ft = c.eval(&trial);
        if ft < vals[b] {
            let worst = (0..=n)
                .max_by(|&p, &q| dist(&pts[p], &trial).total_cmp(&dist(&pts[q], &trial)))
                .unwrap();
            pts[worst] = trial;
            vals[worst] = ft;
        } else if dist(&pts[far], &pts[b]) > 1.5 * rho {
            // tighten the model before trusting the failure
            pts[far] = trial;
            vals[far] = ft;
        } else {
            if rho <= tr.rho_end {
                return;
            }
            rho = (rho / 2.0).max(tr.rho_end);
        }
    }
}

/// Nelder-Mead with standard coefficients; the initial simplex steps of 0.5
/// take seeded random signs.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(c: &mut Counter<F>, x0: &[f64], seed: u64) {
    let n = x0.len();
    let mut r = rng::seeded(seed);
    let mut pts = vec![x0.to_vec()];
    let mut vals = vec![c.eval(x0)];
    for i in 0..n {
        if c.left() == 0 {
            return;
        }
        let mut x = x0.to_vec();
        x[i] += if r.random::<bool>() { 0.5 } else { -0.5 };
        vals.push(c.eval(&x));
        pts.push(x);
    }
    if n == 0 {
        return;
    }
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };
    while c.left() > 0 {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        if dist(&pts[best], &pts[worst]) < 1e-8 {
            return;
        }
        let mut centroid = vec![0.0; n];
        for &k in &order[..n] {
            for (cj, pj) in centroid.iter_mut().zip(&pts[k]) {
                *cj += pj / n as f64;
            }
        }
        let xr = combine(&centroid, &pts[worst], -1.0);
        let fr = c.eval(&xr);
        if fr < vals[best] {
            if c.left() == 0 {
                pts[worst] = xr;
                vals[worst] = fr;
                return;
            }
            let xe = combine(&centroid, &pts[worst], -2.0);
            let fe = c.eval(&xe);
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        if c.left() == 0 {
            return;
        }
        let (xc, fc) = if fr < vals[worst] {
            let x = combine(&centroid, &xr, 0.5);
            let v = c.eval(&x);
            (x, v.min(f64::INFINITY))
        } else {
            let x = combine(&centroid, &pts[worst], 0.5);
            let v = c.eval(&x);
            (x, v)
        };
        if fc < vals[worst].min(fr) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        for &k in &order[1..] {
            if c.left() == 0 {
                return;
            }
            pts[k] = combine(&pts[best], &pts[k], 0.5);
            vals[k] = c.eval(&pts[k]);
        }
    }
}
