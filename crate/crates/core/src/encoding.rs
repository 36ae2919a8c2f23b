//! Assignment of QUBO variables to two-body Pauli correlators.

use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Species {
    XX,
    YY,
    ZZ,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::XX, Species::YY, Species::ZZ];
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Species::XX => "XX",
            Species::YY => "YY",
            Species::ZZ => "ZZ",
        };
        f.write_str(s)
    }
}

/// Correlator `P_a P_b` on qubits `a < b`. Serialized as `[a, b, "XX"]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize, Species)", into = "(usize, usize, Species)")]
pub struct Slot {
    pub a: usize,
    pub b: usize,
    pub species: Species,
}

impl From<(usize, usize, Species)> for Slot {
    fn from((a, b, species): (usize, usize, Species)) -> Self {
        Slot { a, b, species }
    }
}

impl From<Slot> for (usize, usize, Species) {
    fn from(s: Slot) -> Self {
        (s.a, s.b, s.species)
    }
}

impl Slot {
    pub fn pair(&self) -> (usize, usize) {
        (self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignPolicy {
    /// All `XX` slots over lexicographic pairs, then `YY`, then `ZZ`.
    #[default]
    Lexicographic,
    /// The lexicographic list permuted by a seeded shuffle.
    SeededShuffle,
}

/// Variable `k` is read out as the expectation of `slots[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMap {
    pub n: usize,
    pub slots: Vec<Slot>,
}

impl EncodingMap {
    pub fn m(&self) -> usize {
        self.slots.len()
    }

    /// Qubit pair carrying variable `k`.
    pub fn pair(&self, k: usize) -> (usize, usize) {
        self.slots[k].pair()
    }
}

/// Number of distinct two-body correlators on `n` qubits, `3 * C(n, 2)`.
pub fn capacity(n: usize) -> usize {
    3 * n * n.saturating_sub(1) / 2
}

/// Smallest `n` with `3 * C(n, 2) >= m`.
pub fn min_qubits(m: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::NonPositiveM);
    }
    let mut n = 2;
    while capacity(n) < m {
        n += 1;
    }
    Ok(n)
}

pub fn assign_correlators(m: usize, n: usize, policy: AssignPolicy, seed: u64) -> Result<EncodingMap> {
    let cap = capacity(n);
    if m > cap {
        return Err(Error::CapacityExceeded { m, n, capacity: cap });
    }
    let mut all = Vec::with_capacity(cap);
    for species in Species::ALL {
        for a in 0..n {
            for b in (a + 1)..n {
                all.push(Slot { a, b, species });
            }
        }
    }
    if policy == AssignPolicy::SeededShuffle {
        all.shuffle(&mut rng::seeded(seed));
    }
    all.truncate(m);
    Ok(EncodingMap { n, slots: all })
}
