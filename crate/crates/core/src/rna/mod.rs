//! Sequence handling and construction of the quartet QUBO.

pub mod benchmarks;
mod energy;
mod instance;
mod quartet;
mod sequence;
mod structure;

pub use energy::EnergyTable;
pub use instance::{
    assemble_qubo, build_instance, Coefficients, PenaltyPolicy, QuboInstance, QuboParams,
};
pub use quartet::{
    build_relations, enumerate_quartets, quartets_conflict, ConflictRule, FoldingRules, Quartet,
    RelationSets,
};
pub use sequence::{parse_fasta, parse_sequence, Base, Sequence};
pub use structure::{parse_dot_bracket, selected_pairs, to_dot_bracket};

/// Convenience alias for 0/1 assignments.
pub type Bits = Vec<bool>;

/// Renders an assignment as a `0`/`1` string.
pub fn bits_to_string(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn bits_from_string(s: &str) -> crate::Result<Bits> {
    s.chars()
        .enumerate()
        .map(|(k, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(crate::Error::IllegalCharacter {
                position: k + 1,
                found: other,
            }),
        })
        .collect()
}

/// Serde adapter storing a bitstring as a `"0101"` string.
pub mod bitstring_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::bits_to_string(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<super::Bits, D::Error> {
        let s = String::deserialize(d)?;
        super::bits_from_string(&s).map_err(serde::de::Error::custom)
    }
}
