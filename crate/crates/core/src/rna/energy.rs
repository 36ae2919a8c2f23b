use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const BUNDLED: &str = include_str!("../../data/stacking_energies.json");

/// Stacked-pair free energies keyed by outer pair then inner pair
/// (`"AUGC"` = outer A-U, inner G-C).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyTable(BTreeMap<String, f64>);

impl EnergyTable {
    /// Nearest-neighbour stacking energies (kcal/mol, 37 C) shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled energy table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let map: BTreeMap<String, f64> = serde_json::from_str(text)?;
        Ok(EnergyTable(
            map.into_iter()
                .map(|(k, v)| (k.to_ascii_uppercase().replace('T', "U"), v))
                .collect(),
        ))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn get(&self, stack: &str) -> Result<f64> {
        self.0
            .get(stack)
            .copied()
            .ok_or_else(|| Error::MissingEnergyEntry(stack.to_string()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, f64)> for EnergyTable {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        EnergyTable(iter.into_iter().collect())
    }
}
