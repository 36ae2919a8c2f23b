use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::importance::PairImportance;
use super::Pair;
use crate::{rng, Error};

/// Entangling-pair topology of an ansatz layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Hamiltonian path over a seeded random qubit order.
    #[serde(rename = "nn")]
    NearestNeighbor,
    /// Maximum spanning tree of the pair importance.
    #[serde(rename = "informed_k")]
    InformedK,
    /// Spanning tree plus the next `n - 1` most important pairs.
    #[serde(rename = "informed_2k")]
    Informed2K,
    /// Every pair, seeded random order.
    All,
}

impl Topology {
    pub const ALL: [Topology; 4] = [
        Topology::NearestNeighbor,
        Topology::InformedK,
        Topology::Informed2K,
        Topology::All,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Topology::NearestNeighbor => "nn",
            Topology::InformedK => "informed_k",
            Topology::Informed2K => "informed_2k",
            Topology::All => "all",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "nn" | "nearest_neighbor" => Ok(Topology::NearestNeighbor),
            "informed_k" | "informedk" => Ok(Topology::InformedK),
            "informed_2k" | "informed2k" => Ok(Topology::Informed2K),
            "all" => Ok(Topology::All),
            other => Err(Error::InvalidConfig(format!("unknown topology {other:?}"))),
        }
    }
}

/// Kruskal pass over `candidates` in the given order, keeping every pair
/// that joins two components. Returns the kept pairs and the union-find
/// state so callers can continue the pass over further candidates.
pub(crate) fn kruskal(
    n: usize,
    candidates: impl IntoIterator<Item = Pair>,
    uf: Option<UnionFind<usize>>,
) -> (Vec<Pair>, UnionFind<usize>) {
    let mut uf = uf.unwrap_or_else(|| UnionFind::new(n));
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for (a, b) in candidates {
        if uf.union(a, b) {
            tree.push((a, b));
        }
    }
    (tree, uf)
}

pub(crate) fn components(uf: &UnionFind<usize>, n: usize) -> usize {
    let mut roots: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Maximum-weight spanning tree, ties broken by `(a, b)`.
pub fn max_spanning_tree(imp: &PairImportance) -> Vec<Pair> {
    kruskal(imp.n(), imp.ranked().into_iter().map(|(p, _)| p), None).0
}

pub fn select_topology(kind: Topology, n: usize, imp: &PairImportance, seed: u64) -> Vec<Pair> {
    assert!(n >= 2 && imp.n() == n, "topology needs n >= 2 matching the importance table");
    match kind {
        Topology::NearestNeighbor => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng::seeded(seed));
            order
                .windows(2)
                .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
                .collect()
        }
        Topology::InformedK => max_spanning_tree(imp),
        Topology::Informed2K => {
            let mut pairs = max_spanning_tree(imp);
            let extra: Vec<Pair> = imp
                .ranked()
                .into_iter()
                .map(|(p, _)| p)
                .filter(|p| !pairs.contains(p))
                .take(n - 1)
                .collect();
            pairs.extend(extra);
            pairs
        }
        Topology::All => {
            let mut pairs: Vec<Pair> = (0..n)
                .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
                .collect();
            pairs.shuffle(&mut rng::seeded(seed));
            pairs
        }
    }
}
