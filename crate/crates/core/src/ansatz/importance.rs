use serde::{Deserialize, Serialize};

use super::Pair;
use crate::encoding::EncodingMap;
use crate::rna::QuboInstance;
use crate::{Error, Result};

/// Non-negative score for every unordered qubit pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairImportance {
    n: usize,
    scores: Vec<f64>,
}

impl PairImportance {
    pub fn zeros(n: usize) -> Self {
        PairImportance {
            n,
            scores: vec![0.0; n * n],
        }
    }

    pub fn from_scores(n: usize, entries: &[(Pair, f64)]) -> Self {
        let mut imp = Self::zeros(n);
        for &((a, b), w) in entries {
            imp.add(a, b, w);
        }
        imp
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.scores[a * self.n + b]
    }

    pub fn add(&mut self, a: usize, b: usize, w: f64) {
        debug_assert!(a != b);
        self.scores[a * self.n + b] += w;
        self.scores[b * self.n + a] += w;
    }

    /// All `C(n, 2)` pairs, highest score first; ties broken by `(a, b)`.
    pub fn ranked(&self) -> Vec<(Pair, f64)> {
        let mut v: Vec<(Pair, f64)> = (0..self.n)
            .flat_map(|a| ((a + 1)..self.n).map(move |b| (a, b)))
            .map(|(a, b)| ((a, b), self.get(a, b)))
            .collect();
        v.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        v
    }

    pub fn max(&self) -> f64 {
        self.scores.iter().copied().fold(0.0, f64::max)
    }

    pub fn weight(&self, pairs: &[Pair]) -> f64 {
        pairs.iter().map(|&(a, b)| self.get(a, b)).sum()
    }

    /// Sum of the `k` largest pair scores.
    pub fn top_k_ceiling(&self, k: usize) -> f64 {
        self.ranked().iter().take(k).map(|(_, w)| w).sum()
    }

    /// Scores with qubits renamed: entry `(a, b)` of the result is entry
    /// `(perm[a], perm[b])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                out.scores[a * self.n + b] = self.get(perm[a], perm[b]);
            }
        }
        out
    }
}

impl Serialize for PairImportance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<(usize, usize, f64)> = (0..self.n)
            .flat_map(|a| ((a + 1)..self.n).map(move |b| (a, b)))
            .map(|(a, b)| (a, b, self.get(a, b)))
            .collect();
        (self.n, entries).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PairImportance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (n, entries): (usize, Vec<(usize, usize, f64)>) = Deserialize::deserialize(d)?;
        let mut imp = PairImportance::zeros(n);
        for (a, b, w) in entries {
            if a >= n || b >= n || a == b {
                return Err(serde::de::Error::custom("pair out of range"));
            }
            imp.add(a, b, w);
        }
        Ok(imp)
    }
}

fn ordered(a: usize, b: usize) -> Pair {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Accumulates QUBO coupling weight onto qubit pairs.
///
/// For each coupling `w = |Q_ij| + |Q_ji| > 0` the pairs encoding `i` and
/// `j` each gain `w`. Every other pair spanning one qubit of each encoding
/// (up to four of them) gains `w / 2`, once per coupling.
pub fn importance_scores(inst: &QuboInstance, enc: &EncodingMap) -> Result<PairImportance> {
    if enc.m() != inst.m() {
        return Err(Error::EncodingMismatch {
            expected: inst.m(),
            encoded: enc.m(),
        });
    }
    let mut imp = PairImportance::zeros(enc.n);
    let mut cross: Vec<Pair> = Vec::with_capacity(4);
    for i in 0..inst.m() {
        let pi = enc.pair(i);
        let row = inst.row(i);
        for j in (i + 1)..inst.m() {
            let w = 2.0 * row[j].abs();
            if w == 0.0 {
                continue;
            }
            let pj = enc.pair(j);
            imp.add(pi.0, pi.1, w);
            imp.add(pj.0, pj.1, w);
            cross.clear();
            for a in [pi.0, pi.1] {
                for b in [pj.0, pj.1] {
                    if a == b {
                        continue;
                    }
                    let c = ordered(a, b);
                    if c != pi && c != pj && !cross.contains(&c) {
                        cross.push(c);
                    }
                }
            }
            for &(a, b) in &cross {
                imp.add(a, b, 0.5 * w);
            }
        }
    }
    Ok(imp)
}
