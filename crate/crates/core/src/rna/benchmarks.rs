//! Benchmark sequences and seeded instance generators for tests and sweeps.

use rand::Rng;

use super::instance::{Coefficients, QuboInstance};
use super::quartet::RelationSets;
use super::sequence::{Base, Sequence};
use crate::rng;

/// One row of the benchmark table.
#[derive(Debug, Clone, Copy)]
pub struct Benchmark {
    pub id: &'static str,
    pub m: usize,
    pub length: usize,
    pub qubits: usize,
    pub conflicts: usize,
    pub sequence: &'static str,
}

impl Benchmark {
    pub fn parse(&self) -> Sequence {
        super::parse_sequence(self.sequence, self.id).expect("benchmark sequences are valid")
    }
}

pub const BENCHMARKS: [Benchmark; 9] = [
    Benchmark {
        id: "seq_50",
        m: 50,
        length: 30,
        qubits: 7,
        conflicts: 991,
        sequence: "AAGCCUAUCAACGGCGUGCGCUGUGAUAUG",
    },
    Benchmark {
        id: "seq_80",
        m: 80,
        length: 42,
        qubits: 8,
        conflicts: 2345,
        sequence: "CCAUUUAUACCCCGGGCCGCCUACUGCACCCAGUGUAACAUG",
    },
    Benchmark {
        id: "seq_120",
        m: 120,
        length: 45,
        qubits: 10,
        conflicts: 5427,
        sequence: "AUCCAUCAGUGGUACUGCAUGAUGCCCAUCUGCAUGGCCAAGAGG",
    },
    Benchmark {
        id: "seq_152",
        m: 152,
        length: 60,
        qubits: 11,
        conflicts: 8236,
        sequence: "AUGAACCCCGACUGGACCCUGGCCAGAGUGAAGAGAAUCAUCAUCCUGCCCCACGAGUUC",
    },
    Benchmark {
        id: "seq_195",
        m: 195,
        length: 60,
        qubits: 12,
        conflicts: 13949,
        sequence: "GCUCGCGAAGAUCAGGGAUCACGAUGCUCGAAUUUUUAGACGAUCUAUAACGCCUCUCGG",
    },
    Benchmark {
        id: "seq_240",
        m: 240,
        length: 60,
        qubits: 14,
        conflicts: 21050,
        sequence: "GUCGGCAGCCUCGUGCCACCGCGAAGCGGUGCGAGCGCCGUGUCCAUGCCUACGGAGAUC",
    },
    Benchmark {
        id: "seq_694",
        m: 694,
        length: 102,
        qubits: 23,
        conflicts: 172_307,
        sequence: "UCAACCGAAGGAGAAUCUUCCUUAAGAGCACCACGUAAGUGGGCCGGAUUUAGAUCUCCU\
                   UAUAAGAAAGGGCUGCAUUCAGGUGCGCUUGUUUGCCAGCCC",
    },
    Benchmark {
        id: "seq_715",
        m: 715,
        length: 105,
        qubits: 23,
        conflicts: 182_633,
        sequence: "AAAAGGGAUCUUGCGAUCAAUUAGUAUACCCUUAAUCCUGAUCGUUGCUUCACAACCUAA\
                   AUGAAGUCUUAGUUGGACAAUCGAGUUUCACGGGUCGCUAAUAGA",
    },
    Benchmark {
        id: "seq_745",
        m: 745,
        length: 105,
        qubits: 23,
        conflicts: 192_959,
        sequence: "UUCUCUAUUCUGAAUAGCCCUCCAGUCACCUCUUAAGAAUCGGUCAGGUACAUUAGAAAG\
                   CAAAGCAAAAGGAUUUUUAGAGCGUUAUGGACAUUCAUUGGGUAC",
    },
];

pub fn benchmark(id: &str) -> Option<&'static Benchmark> {
    BENCHMARKS.iter().find(|b| b.id == id)
}

/// Uniform random RNA string.
pub fn random_sequence(id: &str, len: usize, seed: u64) -> Sequence {
    let mut rng = rng::seeded(seed);
    let alphabet = [Base::A, Base::U, Base::C, Base::G];
    let bases = (0..len).map(|_| alphabet[rng.random_range(0..4)]).collect();
    Sequence::new(id, bases).expect("non-empty")
}

/// Synthetic dense-constraint QUBO shaped like the RNA instances: negative
/// stem energies on the diagonal, conflict density drawn from `[0.6, 0.85]`,
/// a sprinkling of negative stacking couplings and a dominant penalty.
pub fn random_dense_instance(m: usize, seed: u64) -> QuboInstance {
    let mut rng = rng::seeded(seed);
    let diag: Vec<f64> = (0..m).map(|_| rng.random_range(-3.5..-0.5)).collect();
    let density = rng.random_range(0.6..0.85);
    let mean_abs = diag.iter().map(|v| v.abs()).sum::<f64>() / m.max(1) as f64;
    let r = -0.5 * mean_abs;
    let mut rel = RelationSets::default();
    for a in 0..m {
        for b in (a + 1)..m {
            if rng.random_bool(density) {
                rel.conflicts.push((a, b));
            } else if rng.random_bool(0.3) {
                rel.stackings.push((a, b));
            }
        }
    }
    let t = diag.iter().map(|v| v.abs()).sum::<f64>() + r.abs() * rel.stackings.len() as f64 + 1.0;
    let mut q = vec![0.0; m * m];
    for a in 0..m {
        q[a * m + a] = diag[a];
    }
    for &(a, b) in &rel.stackings {
        q[a * m + b] = r / 2.0;
        q[b * m + a] = r / 2.0;
    }
    for &(a, b) in &rel.conflicts {
        q[a * m + b] = t / 2.0;
        q[b * m + a] = t / 2.0;
    }
    QuboInstance::from_matrix(
        format!("dense_{m}_{seed}"),
        m,
        q,
        rel,
        Coefficients { r, p: 0.0, t },
    )
    .expect("generated relations are in range")
}

/// Fully random symmetric QUBO with a random conflict set; couplings of either
/// sign appear between compatible variables. Used to stress the exact solver.
pub fn random_general_instance(m: usize, seed: u64) -> QuboInstance {
    let mut rng = rng::seeded(seed);
    let density = rng.random_range(0.1..0.8);
    let mut rel = RelationSets::default();
    let mut q = vec![0.0; m * m];
    for a in 0..m {
        q[a * m + a] = rng.random_range(-4.0..1.0);
        for b in (a + 1)..m {
            let v = if rng.random_bool(density) {
                rel.conflicts.push((a, b));
                rng.random_range(0.5..3.0)
            } else {
                rng.random_range(-1.5..1.5)
            };
            q[a * m + b] = v;
            q[b * m + a] = v;
        }
    }
    QuboInstance::from_matrix(
        format!("general_{m}_{seed}"),
        m,
        q,
        rel,
        Coefficients { r: 0.0, p: 0.0, t: 0.0 },
    )
    .expect("generated relations are in range")
}
