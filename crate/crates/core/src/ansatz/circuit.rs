use serde::{Deserialize, Serialize};

use super::coloring::edge_color;
use super::Pair;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub pairs: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sublayers: Option<Vec<Vec<Pair>>>,
}

/// Layered ansatz: `p` blocks of (shared Ry, shared MS over the layer's
/// pairs) and a closing Ry layer. Parameters are laid out as
/// `[theta_0, phi_0, ..., theta_{p-1}, phi_{p-1}, theta_p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n: usize,
    pub p: usize,
    pub layers: Vec<Layer>,
}

impl CircuitSpec {
    pub fn param_count(&self) -> usize {
        2 * self.p + 1
    }

    pub fn theta_index(layer: usize) -> usize {
        2 * layer
    }

    pub fn phi_index(layer: usize) -> usize {
        2 * layer + 1
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.param_count());
        for l in 0..self.p {
            names.push(format!("theta_{l}"));
            names.push(format!("phi_{l}"));
        }
        names.push(format!("theta_{}", self.p));
        names
    }

    /// Attach a parallel sublayer partition to every layer.
    pub fn colored(mut self) -> Self {
        for layer in &mut self.layers {
            layer.sublayers = Some(edge_color(&layer.pairs));
        }
        self
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.pairs.len()).sum()
    }

    /// JSON export with the parameter layout included.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Export<'a> {
            n: usize,
            p: usize,
            param_count: usize,
            param_layout: Vec<String>,
            layers: &'a [Layer],
        }
        Ok(serde_json::to_string_pretty(&Export {
            n: self.n,
            p: self.p,
            param_count: self.param_count(),
            param_layout: self.param_names(),
            layers: &self.layers,
        })?)
    }
}

/// Builds a depth-`p` circuit. A single pair list is reused for every layer;
/// otherwise exactly `p` lists are required. Pairs are stored as `(a, b)`
/// with `a < b`.
pub fn build_circuit(n: usize, p: usize, pair_layers: &[Vec<Pair>]) -> Result<CircuitSpec> {
    if p == 0 {
        return Err(Error::InvalidCircuit("depth must be at least 1".into()));
    }
    let lists: Vec<&Vec<Pair>> = match pair_layers.len() {
        1 => vec![&pair_layers[0]; p],
        k if k == p => pair_layers.iter().collect(),
        k => {
            return Err(Error::InvalidCircuit(format!(
                "{k} pair lists given for depth {p}"
            )))
        }
    };
    let mut layers = Vec::with_capacity(p);
    for list in lists {
        if list.is_empty() {
            return Err(Error::InvalidCircuit("empty pair list".into()));
        }
        let mut pairs = Vec::with_capacity(list.len());
        for &(a, b) in list {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidPair(a, b, n));
            }
            pairs.push((a.min(b), a.max(b)));
        }
        layers.push(Layer {
            pairs,
            sublayers: None,
        });
    }
    Ok(CircuitSpec { n, p, layers })
}
