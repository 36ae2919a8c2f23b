//! Circuit construction: pair importance, entangling topologies, device-aware
//! selection, edge coloring and qubit placement.

mod anneal;
mod circuit;
mod coloring;
mod device;
mod importance;
mod topology;

pub type Pair = (usize, usize);

pub use anneal::{anneal_relabel, AnnealConfig, Relabeling};
pub use circuit::{build_circuit, CircuitSpec, Layer};
pub use coloring::edge_color;
pub use device::{discounted_importance, hardware_aware_select, DeviceGraph, HardwareSelection};
pub use importance::{importance_scores, PairImportance};
pub use topology::{max_spanning_tree, select_topology, Topology};
