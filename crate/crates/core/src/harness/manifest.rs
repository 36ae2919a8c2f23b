use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::{
    anneal_relabel, build_circuit, hardware_aware_select, importance_scores, select_topology,
    AnnealConfig, CircuitSpec, DeviceGraph, PairImportance, Topology,
};
use crate::encoding::{assign_correlators, min_qubits, AssignPolicy, EncodingMap};
use crate::rna::{
    benchmarks, build_instance, parse_fasta, ConflictRule, EnergyTable, FoldingRules,
    QuboInstance, QuboParams, Sequence,
};
use crate::train::{LossKind, Optimizer};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSpec {
    /// One of the bundled benchmark sequences.
    Benchmark { id: String },
    Sequence { id: String, sequence: String },
    /// FASTA or bare sequence file; the first record is used.
    SequenceFile { path: PathBuf },
    /// A prebuilt QUBO instance.
    Qubo { path: PathBuf },
}

impl InputSpec {
    /// Interprets a CLI argument: an existing path, else a benchmark id.
    pub fn from_arg(arg: &str) -> Result<Self> {
        let p = Path::new(arg);
        if p.exists() {
            Ok(InputSpec::SequenceFile { path: p.to_path_buf() })
        } else if benchmarks::benchmark(arg).is_some() {
            Ok(InputSpec::Benchmark { id: arg.to_string() })
        } else {
            Err(Error::InvalidConfig(format!(
                "{arg:?} is neither a file nor a benchmark id"
            )))
        }
    }
}

pub fn read_sequence(path: &Path) -> Result<Sequence> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("sequence");
    parse_fasta(&text, stem)?
        .into_iter()
        .next()
        .ok_or(Error::EmptyInput)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Trained,
    Untrained,
    RandomEv,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::Trained => "trained",
            Condition::Untrained => "untrained",
            Condition::RandomEv => "random_ev",
        }
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "trained" => Ok(Condition::Trained),
            "untrained" => Ok(Condition::Untrained),
            "random_ev" | "random" => Ok(Condition::RandomEv),
            other => Err(Error::InvalidConfig(format!("unknown condition {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Sign,
    SignLs,
    Pagd,
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Sign => "sign",
            DecoderKind::SignLs => "sign_ls",
            DecoderKind::Pagd => "pagd",
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '+'], "_").as_str() {
            "sign" => Ok(DecoderKind::Sign),
            "sign_ls" | "signls" | "ls" => Ok(DecoderKind::SignLs),
            "pagd" | "pagd_k" => Ok(DecoderKind::Pagd),
            other => Err(Error::InvalidConfig(format!("unknown decoder {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceConfig {
    /// Device graph file; the bundled two-cell graph when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Node the qubit subset is grown from.
    #[serde(default)]
    pub start: usize,
    /// Anneal the logical-to-physical placement first.
    #[serde(default = "yes")]
    pub relabel: bool,
}

fn default_lambda() -> f64 {
    0.3
}

fn yes() -> bool {
    true
}

impl Default for DeviceConfig {
    fn default() -> Self {
        DeviceConfig {
            path: None,
            lambda: default_lambda(),
            start: 0,
            relabel: true,
        }
    }
}

/// Depth by instance size.
pub fn default_depth(m: usize) -> usize {
    match m {
        0..=120 => 2,
        121..=152 => 4,
        153..=240 => 6,
        _ => 10,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentManifest {
    pub input: InputSpec,
    pub folding: FoldingRules,
    pub conflict_rule: ConflictRule,
    /// Energy table file; the bundled table when absent.
    pub energy_table: Option<PathBuf>,
    pub qubo: QuboParams,
    pub topology: Topology,
    pub device: Option<DeviceConfig>,
    /// `None` picks the depth from the instance size.
    pub depth: Option<usize>,
    pub seeds: Vec<u64>,
    pub iters: usize,
    pub alpha: f64,
    pub optimizer: Optimizer,
    pub loss: LossKind,
    pub shots: Option<usize>,
    pub beta: f64,
    pub sigma_noise: f64,
    pub t_ls: usize,
    pub k_list: Vec<usize>,
    pub decoders: Vec<DecoderKind>,
    pub conditions: Vec<Condition>,
    pub node_limit: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentManifest {
    fn default() -> Self {
        ExperimentManifest {
            input: InputSpec::Benchmark {
                id: "seq_50".into(),
            },
            folding: FoldingRules::default(),
            conflict_rule: ConflictRule::default(),
            energy_table: None,
            qubo: QuboParams::default(),
            topology: Topology::InformedK,
            device: None,
            depth: None,
            seeds: (0..20).collect(),
            iters: 160,
            alpha: 8.0,
            optimizer: Optimizer::TrustRegionLinear,
            loss: LossKind::QuboSigmoid,
            shots: None,
            beta: 1.0,
            sigma_noise: 0.2,
            t_ls: 3,
            k_list: vec![1, 10, 50, 100, 200],
            decoders: vec![DecoderKind::Sign, DecoderKind::SignLs, DecoderKind::Pagd],
            conditions: vec![Condition::Trained],
            node_limit: 5_000_000,
            workers: 1,
            out: None,
        }
    }
}

impl ExperimentManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: ExperimentManifest = serde_json::from_str(&text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.seeds.is_empty() {
            return bad("seed list is empty");
        }
        if self.k_list.is_empty() || self.k_list.contains(&0) {
            return bad("K values must be >= 1");
        }
        if self.depth == Some(0) {
            return bad("depth must be >= 1");
        }
        if self.conditions.is_empty() {
            return bad("no conditions selected");
        }
        if self.decoders.is_empty() {
            return bad("no decoders selected");
        }
        if !(self.alpha > 0.0) || !(self.beta >= 0.0) || !(self.sigma_noise >= 0.0) {
            return bad("alpha must be > 0, beta and sigma_noise >= 0");
        }
        if self.node_limit == 0 {
            return bad("node limit must be >= 1");
        }
        Ok(())
    }

    pub fn max_k(&self) -> usize {
        self.k_list.iter().copied().max().unwrap_or(1)
    }

    pub fn build_instance(&self) -> Result<QuboInstance> {
        let table = match &self.energy_table {
            Some(p) => EnergyTable::from_path(p)?,
            None => EnergyTable::bundled(),
        };
        let seq = match &self.input {
            InputSpec::Qubo { path } => return QuboInstance::load(path),
            InputSpec::Benchmark { id } => benchmarks::benchmark(id)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown benchmark {id:?}")))?
                .parse(),
            InputSpec::Sequence { id, sequence } => crate::rna::parse_sequence(sequence, id)?,
            InputSpec::SequenceFile { path } => read_sequence(path)?,
        };
        build_instance(&seq, &self.folding, self.conflict_rule, &table, &self.qubo)
    }

    /// Instance, encoding and circuit for this manifest.
    pub fn prepare(&self) -> Result<Prepared> {
        self.validate()?;
        let inst = self.build_instance()?;
        self.prepare_instance(inst)
    }

    pub fn prepare_instance(&self, inst: QuboInstance) -> Result<Prepared> {
        let m = inst.m();
        if m == 0 {
            return Err(Error::NonPositiveM);
        }
        let n = min_qubits(m)?.max(2);
        let enc = assign_correlators(m, n, AssignPolicy::Lexicographic, 0)?;
        let imp = importance_scores(&inst, &enc)?;
        let depth = self.depth.unwrap_or_else(|| default_depth(m));
        let mut placement = None;
        let pairs = match &self.device {
            None => select_topology(self.topology, n, &imp, 0),
            Some(dc) => {
                let dev = match &dc.path {
                    Some(p) => DeviceGraph::load(p)?,
                    None => DeviceGraph::two_hex(),
                };
                let subset = dev.connected_subset(dc.start, n)?;
                // logical qubit l sits on subset[l]
                let subset = if dc.relabel {
                    anneal_relabel(&imp, &dev, &subset, &AnnealConfig::default(), 0)?.physical
                } else {
                    subset
                };
                let pairs = hardware_aware_select(&imp, &dev, &subset, dc.lambda)?.pairs;
                placement = Some(subset);
                pairs
            }
        };
        let mut circuit = build_circuit(n, depth, &[pairs])?;
        if self.device.is_some() {
            circuit = circuit.colored();
        }
        Ok(Prepared {
            inst,
            enc,
            importance: imp,
            circuit,
            placement,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub inst: QuboInstance,
    pub enc: EncodingMap,
    pub importance: PairImportance,
    pub circuit: CircuitSpec,
    /// Device node of each logical qubit, when placed on a device.
    pub placement: Option<Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_by_size() {
        assert_eq!(default_depth(50), 2);
        assert_eq!(default_depth(120), 2);
        assert_eq!(default_depth(152), 4);
        assert_eq!(default_depth(195), 6);
        assert_eq!(default_depth(240), 6);
        assert_eq!(default_depth(694), 10);
    }

    #[test]
    fn manifest_round_trip_and_defaults() {
        let m: ExperimentManifest =
            serde_json::from_str(r#"{"input": {"kind": "benchmark", "id": "seq_80"}, "seeds": [1, 2]}"#)
                .unwrap();
        assert_eq!(m.seeds, vec![1, 2]);
        assert_eq!(m.alpha, 8.0);
        assert_eq!(m.t_ls, 3);
        let back: ExperimentManifest =
            serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn validation() {
        let mut m = ExperimentManifest::default();
        assert!(m.validate().is_ok());
        m.k_list = vec![0];
        assert!(m.validate().is_err());
        let m = ExperimentManifest {
            seeds: vec![],
            ..Default::default()
        };
        assert!(m.validate().is_err());
    }

    #[test]
    fn prepare_benchmark() {
        let p = ExperimentManifest::default().prepare().unwrap();
        assert_eq!(p.inst.m(), 50);
        assert_eq!(p.enc.n, 7);
        assert_eq!(p.circuit.p, 2);
        assert_eq!(p.circuit.layers[0].pairs.len(), 6);
    }

    #[test]
    fn names_parse() {
        assert_eq!("random-ev".parse::<Condition>().unwrap(), Condition::RandomEv);
        assert_eq!("Sign+LS".parse::<DecoderKind>().unwrap(), DecoderKind::SignLs);
        assert!("nope".parse::<DecoderKind>().is_err());
    }
}
