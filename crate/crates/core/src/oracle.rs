//! Exact minimization over conflict-free bitstrings by branch and bound.

use serde::{Deserialize, Serialize};

use crate::decode::pagd;
use crate::rna::{Bits, QuboInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    #[serde(with = "crate::rna::bitstring_serde")]
    pub bits: Bits,
    pub energy: f64,
    pub proved_optimal: bool,
    pub nodes_explored: u64,
}

pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

struct Search<'a> {
    inst: &'a QuboInstance,
    /// Variables sorted by diagonal, ascending.
    order: Vec<usize>,
    conflict: Vec<Vec<bool>>,
    /// Negative off-diagonal entries per variable.
    neg: Vec<Vec<(usize, f64)>>,
    best: f64,
    best_bits: Bits,
    nodes: u64,
    limit: u64,
    aborted: bool,
}

impl Search<'_> {
    /// Lower bound on the energy change of any conflict-free completion drawn
    /// from `free`, given the current marginals `a`.
    fn bound(&self, free: &[usize], a: &[f64], in_free: &[bool]) -> f64 {
        // per-variable optimistic value: own marginal plus every negative
        // coupling it could still collect
        let mut b: Vec<(f64, usize)> = free
            .iter()
            .map(|&v| {
                let extra: f64 = self.neg[v]
                    .iter()
                    .filter(|&&(u, _)| in_free[u])
                    .map(|&(_, q)| q)
                    .sum();
                (a[v] + extra, v)
            })
            .filter(|&(x, _)| x < 0.0)
            .collect();
        b.sort_by(|x, y| x.0.total_cmp(&y.0));
        // at most one member of each conflict clique can be chosen; greedily
        // cover by cliques, each charged its most negative member
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        let mut total = 0.0;
        for &(val, v) in &b {
            let home = cliques
                .iter_mut()
                .find(|c| c.iter().all(|&u| self.conflict[v][u]));
            match home {
                Some(c) => c.push(v),
                None => {
                    cliques.push(vec![v]);
                    total += val;
                }
            }
        }
        total
    }

    fn dfs(&mut self, x: &mut Bits, energy: f64, free: Vec<usize>, a: Vec<f64>) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return;
        }
        if energy < self.best - 1e-12 {
            self.best = energy;
            self.best_bits.clone_from(x);
        }
        if free.is_empty() {
            return;
        }
        let m = self.inst.m();
        let mut in_free = vec![false; m];
        for &v in &free {
            in_free[v] = true;
        }
        if energy + self.bound(&free, &a, &in_free) >= self.best - 1e-9 {
            return;
        }
        let v = free[0];
        // include v
        let row = self.inst.row(v);
        let inc_free: Vec<usize> = free[1..]
            .iter()
            .copied()
            .filter(|&u| !self.conflict[v][u])
            .collect();
        let mut inc_a = a.clone();
        for &u in &inc_free {
            inc_a[u] += 2.0 * row[u];
        }
        x[v] = true;
        self.dfs(x, energy + a[v], inc_free, inc_a);
        x[v] = false;
        // exclude v
        self.dfs(x, energy, free[1..].to_vec(), a);
    }
}

/// Depth-first branch and bound over independent sets of the conflict graph,
/// seeded with the greedy decode as incumbent. When the node budget runs out
/// the incumbent is returned with `proved_optimal = false`.
pub fn exact_solve(inst: &QuboInstance, node_limit: u64) -> OracleResult {
    let m = inst.m();
    let greedy = pagd(&vec![0.0; m], inst, 1.0, 0.0).expect("length matches");
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&p, &q| inst.get(p, p).total_cmp(&inst.get(q, q)).then(p.cmp(&q)));
    let mut conflict = vec![vec![false; m]; m];
    for &(p, q) in &inst.relations().conflicts {
        conflict[p][q] = true;
        conflict[q][p] = true;
    }
    let neg = (0..m)
        .map(|v| {
            inst.row(v)
                .iter()
                .enumerate()
                .filter(|&(u, &q)| u != v && q < 0.0)
                .map(|(u, &q)| (u, q))
                .collect()
        })
        .collect();
    let mut s = Search {
        inst,
        order,
        conflict,
        neg,
        best: greedy.energy.min(0.0),
        best_bits: if greedy.energy < 0.0 { greedy.bits } else { vec![false; m] },
        nodes: 0,
        limit: node_limit.max(1),
        aborted: false,
    };
    let a: Vec<f64> = (0..m).map(|v| inst.get(v, v)).collect();
    let free = s.order.clone();
    let mut x = vec![false; m];
    s.dfs(&mut x, 0.0, free, a);
    OracleResult {
        energy: inst.energy(&s.best_bits).expect("length matches"),
        bits: s.best_bits,
        proved_optimal: !s.aborted,
        nodes_explored: s.nodes.min(s.limit),
    }
}
