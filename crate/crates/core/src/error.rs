use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,
    #[error("illegal nucleotide {found:?} at position {position}")]
    IllegalCharacter { position: usize, found: char },
    #[error("sequence id must not be empty")]
    EmptyId,
    #[error("energy table has no entry for stacked pair type {0}")]
    MissingEnergyEntry(String),
    #[error("penalty coefficient t must be positive, got {0}")]
    NonPositivePenalty(f64),
    #[error("invalid coefficient {name} = {value}: {reason}")]
    InvalidCoefficient {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("bitstring violates at least one pairing constraint")]
    InfeasibleInput,
    #[error("instance carries no quartet metadata")]
    MissingQuartets,
    #[error("variable count must be positive")]
    NonPositiveM,
    #[error("{m} variables exceed the two-body capacity {capacity} of {n} qubits")]
    CapacityExceeded { m: usize, n: usize, capacity: usize },
    #[error("encoding covers {encoded} variables, instance has {expected}")]
    EncodingMismatch { expected: usize, encoded: usize },
    #[error("invalid qubit pair ({0}, {1}) for {2} qubits")]
    InvalidPair(usize, usize, usize),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("node {0} is not part of the device graph")]
    SubsetNotInDevice(usize),
    #[error("invalid device graph: {0}")]
    InvalidDevice(String),
    #[error("expected {expected} circuit parameters, got {found}")]
    ParamLengthMismatch { expected: usize, found: usize },
    #[error("{0} qubits exceed the simulator cap of {cap}", cap = crate::sim::MAX_QUBITS)]
    RegisterTooLarge(usize),
    #[error("state has {state} qubits but the encoding expects {encoding}")]
    QubitMismatch { state: usize, encoding: usize },
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("optimum energy is zero, relative gap undefined")]
    ZeroOptimum,
    #[error("energy {energy} lies below the optimum {optimum}")]
    BelowOptimum { energy: f64, optimum: f64 },
    #[error("invalid counts: {successes} successes out of {trials} trials")]
    InvalidCounts { successes: usize, trials: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
