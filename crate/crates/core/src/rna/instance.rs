use std::path::Path;

use serde::{Deserialize, Serialize};

use super::energy::EnergyTable;
use super::quartet::{
    build_relations, enumerate_quartets, ConflictRule, FoldingRules, Quartet, RelationSets,
};
use super::sequence::Sequence;
use crate::{Error, Result};

/// How the conflict penalty `t` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyPolicy {
    /// `t = sum |e_q| + |r| * |stackings| + 1`: a single violated constraint
    /// always costs more than the best attainable reward.
    #[default]
    Dominant,
    Fixed(f64),
}

/// Coefficient choices for [`assemble_qubo`]. `None` for `r` selects
/// `-0.5 * mean |e_q|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct QuboParams {
    pub r: Option<f64>,
    pub p: f64,
    pub t: PenaltyPolicy,
}

/// Resolved coefficients stored with an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub r: f64,
    pub p: f64,
    pub t: f64,
}

/// A symmetric QUBO `min x^T Q x` over quartet variables.
///
/// Off-diagonal couplings are split in half across `Q[a][b]` and `Q[b][a]`,
/// so the energy change from switching bit `i` on is
/// `Q[i][i] + 2 * sum_{j set} Q[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    sequence_id: String,
    sequence: Option<String>,
    m: usize,
    q: Vec<f64>,
    relations: RelationSets,
    coeffs: Coefficients,
    quartets: Vec<Quartet>,
    conflict_adj: Vec<Vec<usize>>,
}

impl QuboInstance {
    /// Wraps an arbitrary dense matrix. The matrix is symmetrised as
    /// `(Q + Q^T) / 2`, which leaves the energy unchanged.
    pub fn from_matrix(
        sequence_id: impl Into<String>,
        m: usize,
        matrix: Vec<f64>,
        relations: RelationSets,
        coeffs: Coefficients,
    ) -> Result<Self> {
        if matrix.len() != m * m {
            return Err(Error::LengthMismatch {
                expected: m * m,
                found: matrix.len(),
            });
        }
        let mut q = matrix;
        for a in 0..m {
            for b in (a + 1)..m {
                let v = 0.5 * (q[a * m + b] + q[b * m + a]);
                q[a * m + b] = v;
                q[b * m + a] = v;
            }
        }
        let mut relations = relations;
        for list in [&mut relations.conflicts, &mut relations.stackings] {
            for pair in list.iter_mut() {
                if pair.0 > pair.1 {
                    *pair = (pair.1, pair.0);
                }
            }
            list.sort_unstable();
            list.dedup();
        }
        relations.ua_terminal.sort_unstable();
        relations.ua_terminal.dedup();
        let out_of_range = relations
            .conflicts
            .iter()
            .chain(&relations.stackings)
            .any(|&(a, b)| a == b || b >= m)
            || relations.ua_terminal.iter().any(|&a| a >= m);
        if out_of_range {
            return Err(Error::InvalidConfig(
                "relation sets reference self-pairs or unknown variables".into(),
            ));
        }
        let conflict_adj = relations.conflict_adjacency(m);
        Ok(QuboInstance {
            sequence_id: sequence_id.into(),
            sequence: None,
            m,
            q,
            relations,
            coeffs,
            quartets: Vec::new(),
            conflict_adj,
        })
    }

    pub fn sequence_id(&self) -> &str {
        &self.sequence_id
    }

    pub fn sequence(&self) -> Option<&str> {
        self.sequence.as_deref()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.q[a * self.m + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.q[a * self.m..(a + 1) * self.m]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.q
    }

    pub fn relations(&self) -> &RelationSets {
        &self.relations
    }

    pub fn coeffs(&self) -> Coefficients {
        self.coeffs
    }

    pub fn quartets(&self) -> &[Quartet] {
        &self.quartets
    }

    /// Variables that may not be set together with `a`.
    pub fn conflicts_of(&self, a: usize) -> &[usize] {
        &self.conflict_adj[a]
    }

    fn check_len(&self, x: &[bool]) -> Result<()> {
        if x.len() != self.m {
            return Err(Error::LengthMismatch {
                expected: self.m,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `x^T Q x`.
    pub fn energy(&self, x: &[bool]) -> Result<f64> {
        self.check_len(x)?;
        let on: Vec<usize> = (0..self.m).filter(|&i| x[i]).collect();
        let mut e = 0.0;
        for &a in &on {
            let row = self.row(a);
            for &b in &on {
                e += row[b];
            }
        }
        Ok(e)
    }

    /// Energy change from setting bit `i` (assumed off) given the bits in `x`.
    pub fn marginal(&self, i: usize, x: &[bool]) -> f64 {
        let row = self.row(i);
        let coupling: f64 = (0..self.m).filter(|&j| j != i && x[j]).map(|j| row[j]).sum();
        row[i] + 2.0 * coupling
    }

    pub fn is_feasible(&self, x: &[bool]) -> Result<bool> {
        self.check_len(x)?;
        Ok(self
            .relations
            .conflicts
            .iter()
            .all(|&(a, b)| !(x[a] && x[b])))
    }

    /// Sum of all matrix entries.
    pub fn total(&self) -> f64 {
        self.q.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.q.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&QuboFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: QuboFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

/// Builds the quartet QUBO
///
/// ```text
/// sum e_q x_q + r sum_{stacked} x_a x_b + p sum_{a} sum_{b in UA} x_a (1 - x_b)
///     + t sum_{conflicts} x_a x_b
/// ```
///
/// The UA term is expanded literally: every variable picks up `p * |UA|` on
/// the diagonal and `-p` per (variable, UA member) product.
pub fn assemble_qubo(
    sequence_id: &str,
    quartets: &[Quartet],
    relations: &RelationSets,
    table: &EnergyTable,
    params: &QuboParams,
) -> Result<QuboInstance> {
    let m = quartets.len();
    let e: Vec<f64> = quartets
        .iter()
        .map(|q| table.get(&q.stack))
        .collect::<Result<_>>()?;
    let mean_abs = if m == 0 {
        0.0
    } else {
        e.iter().map(|v| v.abs()).sum::<f64>() / m as f64
    };
    let r = params.r.unwrap_or(-0.5 * mean_abs);
    if !(r <= 0.0) {
        return Err(Error::InvalidCoefficient {
            name: "r",
            value: r,
            reason: "stacking reward must be <= 0",
        });
    }
    if !(params.p >= 0.0) {
        return Err(Error::InvalidCoefficient {
            name: "p",
            value: params.p,
            reason: "UA penalty must be >= 0",
        });
    }
    let t = match params.t {
        PenaltyPolicy::Dominant => {
            e.iter().map(|v| v.abs()).sum::<f64>() + r.abs() * relations.stackings.len() as f64 + 1.0
        }
        PenaltyPolicy::Fixed(t) => t,
    };
    if !(t > 0.0) {
        return Err(Error::NonPositivePenalty(t));
    }
    let p = params.p;

    let mut q = vec![0.0; m * m];
    for (a, &ea) in e.iter().enumerate() {
        q[a * m + a] = ea;
    }
    let add_pair = |q: &mut Vec<f64>, a: usize, b: usize, w: f64| {
        q[a * m + b] += 0.5 * w;
        q[b * m + a] += 0.5 * w;
    };
    for &(a, b) in &relations.stackings {
        add_pair(&mut q, a, b, r);
    }
    for &(a, b) in &relations.conflicts {
        add_pair(&mut q, a, b, t);
    }
    if p != 0.0 {
        let ua = relations.ua_terminal.len() as f64;
        for a in 0..m {
            q[a * m + a] += p * ua;
            for &b in &relations.ua_terminal {
                if a == b {
                    q[a * m + a] -= p;
                } else {
                    add_pair(&mut q, a, b, -p);
                }
            }
        }
    }

    let conflict_adj = relations.conflict_adjacency(m);
    Ok(QuboInstance {
        sequence_id: sequence_id.to_string(),
        sequence: None,
        m,
        q,
        relations: relations.clone(),
        coeffs: Coefficients { r, p, t },
        quartets: quartets.to_vec(),
        conflict_adj,
    })
}

/// Sequence to QUBO in one call.
pub fn build_instance(
    seq: &Sequence,
    rules: &FoldingRules,
    rule: ConflictRule,
    table: &EnergyTable,
    params: &QuboParams,
) -> Result<QuboInstance> {
    let quartets = enumerate_quartets(seq, rules);
    let relations = build_relations(&quartets, rule);
    let mut inst = assemble_qubo(seq.id(), &quartets, &relations, table, params)?;
    inst.sequence = Some(seq.to_string());
    Ok(inst)
}

/// On-disk form: upper-triangle entries `[a, b, Q[a][b]]`, diagonal included.
#[derive(Debug, Serialize, Deserialize)]
struct QuboFile {
    sequence_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sequence: Option<String>,
    m: usize,
    entries: Vec<(usize, usize, f64)>,
    relations: RelationSets,
    coeffs: Coefficients,
    #[serde(default)]
    quartets: Vec<Quartet>,
}

impl From<&QuboInstance> for QuboFile {
    fn from(inst: &QuboInstance) -> Self {
        let m = inst.m;
        let mut entries = Vec::new();
        for a in 0..m {
            for b in a..m {
                let v = inst.get(a, b);
                if v != 0.0 {
                    entries.push((a, b, v));
                }
            }
        }
        QuboFile {
            sequence_id: inst.sequence_id.clone(),
            sequence: inst.sequence.clone(),
            m,
            entries,
            relations: inst.relations.clone(),
            coeffs: inst.coeffs,
            quartets: inst.quartets.clone(),
        }
    }
}

impl TryFrom<QuboFile> for QuboInstance {
    type Error = Error;

    fn try_from(file: QuboFile) -> Result<Self> {
        let m = file.m;
        let mut q = vec![0.0; m * m];
        for &(a, b, v) in &file.entries {
            if a >= m || b >= m {
                return Err(Error::InvalidConfig(format!("entry ({a}, {b}) outside {m}x{m}")));
            }
            q[a * m + b] = v;
            q[b * m + a] = v;
        }
        if !file.quartets.is_empty() && file.quartets.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                found: file.quartets.len(),
            });
        }
        let mut inst = QuboInstance::from_matrix(file.sequence_id, m, q, file.relations, file.coeffs)?;
        inst.sequence = file.sequence;
        inst.quartets = file.quartets;
        Ok(inst)
    }
}
