use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::importance::PairImportance;
use super::topology::{components, kruskal};
use super::Pair;
use crate::{Error, Result};

/// Native two-qubit couplings of a device.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceGraph {
    pub nodes: usize,
    pub edges: Vec<Pair>,
}

impl DeviceGraph {
    pub fn new(nodes: usize, edges: Vec<Pair>) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidDevice(format!("self-loop on node {a}")));
            }
            if a >= nodes || b >= nodes {
                return Err(Error::InvalidDevice(format!("edge ({a}, {b}) outside {nodes} nodes")));
            }
            let e = (a.min(b), a.max(b));
            if norm.contains(&e) {
                return Err(Error::InvalidDevice(format!("duplicate edge ({a}, {b})")));
            }
            norm.push(e);
        }
        Ok(DeviceGraph { nodes, edges: norm })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: DeviceGraph = serde_json::from_str(&text)?;
        DeviceGraph::new(raw.nodes, raw.edges)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// All-pairs hop distances; `usize::MAX` marks unreachable nodes.
    pub fn distances(&self) -> Vec<Vec<usize>> {
        let adj = self.neighbors();
        (0..self.nodes)
            .map(|src| {
                let mut d = vec![usize::MAX; self.nodes];
                d[src] = 0;
                let mut queue = VecDeque::from([src]);
                while let Some(u) = queue.pop_front() {
                    for &v in &adj[u] {
                        if d[v] == usize::MAX {
                            d[v] = d[u] + 1;
                            queue.push_back(v);
                        }
                    }
                }
                d
            })
            .collect()
    }

    /// A connected `n`-node subset grown breadth-first from `start`.
    pub fn connected_subset(&self, start: usize, n: usize) -> Result<Vec<usize>> {
        let adj = self.neighbors();
        let mut seen = vec![false; self.nodes];
        let mut out = Vec::with_capacity(n);
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            out.push(u);
            if out.len() == n {
                return Ok(out);
            }
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        Err(Error::InvalidDevice(format!(
            "component of node {start} has fewer than {n} nodes"
        )))
    }

    /// Two adjacent heavy-hex cells plus two dangling qubits: 23 nodes,
    /// 24 edges, two closed 12-rings sharing a three-qubit side.
    pub fn two_hex() -> Self {
        let mut edges: Vec<Pair> = (0..12).map(|k| (k, (k + 1) % 12)).collect();
        // second ring: 3 - 4 - 5 shared, then 5 -> 12 -> ... -> 20 -> 3
        edges.push((5, 12));
        edges.extend((12..20).map(|k| (k, k + 1)));
        edges.push((20, 3));
        edges.push((9, 21));
        edges.push((17, 22));
        DeviceGraph::new(23, edges).expect("static graph is valid")
    }
}

/// Importance discounted by the SWAP distance of a pair on the device:
/// `I / (1 + lambda * max(d - 1, 0))`.
pub fn discounted_importance(score: f64, distance: usize, lambda: f64) -> f64 {
    let swaps = distance.saturating_sub(1) as f64;
    score / (1.0 + lambda * swaps)
}

/// Result of a device-restricted pair selection, in logical qubit indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareSelection {
    /// Spanning-tree pairs followed by the native add-back pairs.
    pub pairs: Vec<Pair>,
    pub tree: Vec<Pair>,
    pub add_back: Vec<Pair>,
    /// Tree pairs that are not native couplings (fallback only).
    pub non_native: Vec<Pair>,
}

fn check_subset(dev: &DeviceGraph, subset: &[usize]) -> Result<()> {
    for (k, &u) in subset.iter().enumerate() {
        if u >= dev.nodes {
            return Err(Error::SubsetNotInDevice(u));
        }
        if subset[..k].contains(&u) {
            return Err(Error::InvalidDevice(format!("node {u} listed twice in subset")));
        }
    }
    Ok(())
}

/// Device-aware Informed-k selection. Logical qubit `l` sits on physical node
/// `subset[l]`. The Kruskal pass only sees native couplings unless they leave
/// the subset disconnected; afterwards every unused native coupling inside
/// the subset is appended.
pub fn hardware_aware_select(
    imp: &PairImportance,
    dev: &DeviceGraph,
    subset: &[usize],
    lambda: f64,
) -> Result<HardwareSelection> {
    check_subset(dev, subset)?;
    let n = subset.len();
    if imp.n() != n {
        return Err(Error::InvalidConfig(format!(
            "importance covers {} qubits, subset has {n}",
            imp.n()
        )));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!("lambda must be >= 0, got {lambda}")));
    }
    let dist = dev.distances();
    let mut scored: Vec<(Pair, f64, bool)> = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let d = dist[subset[a]][subset[b]];
            let w = if d == usize::MAX {
                0.0
            } else {
                discounted_importance(imp.get(a, b), d, lambda)
            };
            scored.push(((a, b), w, d == 1));
        }
    }
    scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let native: Vec<Pair> = scored.iter().filter(|s| s.2).map(|s| s.0).collect();
    let (mut tree, uf) = kruskal(n, native.iter().copied(), None);
    let mut non_native = Vec::new();
    if components(&uf, n) > 1 {
        let (extra, _) = kruskal(n, scored.iter().filter(|s| !s.2).map(|s| s.0), Some(uf));
        non_native = extra.clone();
        tree.extend(extra);
    }
    let add_back: Vec<Pair> = native.into_iter().filter(|p| !tree.contains(p)).collect();
    let mut pairs = tree.clone();
    pairs.extend(add_back.iter().copied());
    Ok(HardwareSelection {
        pairs,
        tree,
        add_back,
        non_native,
    })
}
