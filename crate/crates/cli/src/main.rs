use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pcefold::ansatz::{DeviceGraph, Topology};
use pcefold::decode::{pagd_k, sign_ls, sign_round, DecodeParams};
use pcefold::encoding::min_qubits;
use pcefold::harness::{
    load_or_solve_oracle, run_experiment, sweep, write_sweep_csv, Condition, DecoderKind,
    DeviceConfig, ExperimentManifest, InputSpec, SweepAxis,
};
use pcefold::rna::{bits_to_string, QuboInstance};

#[derive(Parser)]
#[command(name = "pcefold", version, about = "Pauli-correlation-encoded RNA folding experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the quartet QUBO for a sequence and print its size summary.
    Build {
        /// Sequence file (FASTA or bare) or bundled benchmark id.
        #[arg(long)]
        seq: String,
        #[command(flatten)]
        fold: FoldArgs,
        /// Write the instance JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train, decode and score over seeds and conditions.
    Run(RunArgs),
    /// Repeat a run along one axis and write sweep.csv.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// p, k or topology.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long)]
        values: String,
    },
    /// Solve an instance exactly (or report the incumbent at the node limit).
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fold: FoldArgs,
        #[arg(long, default_value_t = 5_000_000)]
        node_limit: u64,
    },
    /// Decode an expectation-value vector (JSON array) for an instance.
    Decode {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fold: FoldArgs,
        #[arg(long)]
        evs: PathBuf,
        /// sign, sign_ls or pagd.
        #[arg(long, default_value = "pagd")]
        decoder: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 8.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.2)]
        sigma_noise: f64,
        #[arg(long, default_value_t = 3)]
        t_ls: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the bundled two-cell heavy-hex device graph as JSON.
    Device {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Sequence file or benchmark id.
    #[arg(long, conflicts_with = "qubo")]
    seq: Option<String>,
    /// Prebuilt instance JSON.
    #[arg(long)]
    qubo: Option<PathBuf>,
}

impl InputArgs {
    fn spec(&self) -> Result<Option<InputSpec>> {
        Ok(match (&self.seq, &self.qubo) {
            (Some(s), _) => Some(InputSpec::from_arg(s)?),
            (_, Some(q)) => Some(InputSpec::Qubo { path: q.clone() }),
            _ => None,
        })
    }
}

#[derive(Args, Clone)]
struct FoldArgs {
    #[arg(long)]
    min_hairpin: Option<usize>,
    /// Disallow G-U wobble pairs.
    #[arg(long)]
    no_gu: bool,
}

impl FoldArgs {
    fn apply(&self, man: &mut ExperimentManifest) {
        if let Some(h) = self.min_hairpin {
            man.folding.min_hairpin = h;
        }
        if self.no_gu {
            man.folding.allow_gu = false;
        }
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Manifest JSON; flags below override its fields.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    fold: FoldArgs,
    /// nn, informed_k, informed_2k or all.
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    /// A count N (seeds 0..N) or a comma-separated list.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    sigma_noise: Option<f64>,
    #[arg(long)]
    k_list: Option<String>,
    /// Comma-separated subset of trained, untrained, random_ev.
    #[arg(long)]
    conditions: Option<String>,
    /// Comma-separated subset of sign, sign_ls, pagd.
    #[arg(long)]
    decoders: Option<String>,
    /// Device graph JSON, or "two-hex" for the bundled graph.
    #[arg(long)]
    device_graph: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    node_limit: Option<u64>,
}

fn list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|e| anyhow::anyhow!("{t:?}: {e}")))
        .collect()
}

impl RunArgs {
    fn manifest(&self) -> Result<ExperimentManifest> {
        let mut man = match &self.manifest {
            Some(p) => ExperimentManifest::load(p)?,
            None => ExperimentManifest::default(),
        };
        match self.input.spec()? {
            Some(spec) => man.input = spec,
            None if self.manifest.is_none() => bail!("give --seq, --qubo or --manifest"),
            None => {}
        }
        self.fold.apply(&mut man);
        if let Some(t) = &self.topology {
            man.topology = t.parse::<Topology>()?;
        }
        if let Some(d) = self.depth {
            man.depth = Some(d);
        }
        if let Some(s) = &self.seeds {
            man.seeds = if s.contains(',') {
                list(s)?
            } else {
                (0..s.trim().parse::<u64>().context("--seeds")?).collect()
            };
        }
        if let Some(v) = self.iters {
            man.iters = v;
        }
        if let Some(v) = self.alpha {
            man.alpha = v;
        }
        if let Some(v) = self.beta {
            man.beta = v;
        }
        if let Some(v) = self.sigma_noise {
            man.sigma_noise = v;
        }
        if let Some(v) = &self.k_list {
            man.k_list = list(v)?;
        }
        if let Some(v) = &self.conditions {
            man.conditions = list::<Condition>(v)?;
        }
        if let Some(v) = &self.decoders {
            man.decoders = list::<DecoderKind>(v)?;
        }
        if let Some(g) = &self.device_graph {
            let mut dc = man.device.take().unwrap_or_default();
            dc.path = (g != "two-hex" && g != "two_hex").then(|| PathBuf::from(g));
            man.device = Some(dc);
        }
        if let Some(l) = self.lambda {
            man.device.get_or_insert_with(DeviceConfig::default).lambda = l;
        }
        if let Some(o) = &self.out {
            man.out = Some(o.clone());
        }
        if let Some(w) = self.workers {
            man.workers = w;
        }
        if let Some(n) = self.node_limit {
            man.node_limit = n;
        }
        man.validate()?;
        Ok(man)
    }
}

fn load_instance(input: &InputArgs, fold: &FoldArgs) -> Result<QuboInstance> {
    let mut man = ExperimentManifest::default();
    man.input = input.spec()?.context("give --seq or --qubo")?;
    fold.apply(&mut man);
    Ok(man.build_instance()?)
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Build { seq, fold, out } => {
            let inst = load_instance(
                &InputArgs {
                    seq: Some(seq),
                    qubo: None,
                },
                &fold,
            )?;
            let n = min_qubits(inst.m())?;
            let len = inst.sequence().map_or(0, str::len);
            println!(
                "id={} L={} m={} |QC|={} n_min={}",
                inst.sequence_id(),
                len,
                inst.m(),
                inst.relations().conflicts.len(),
                n
            );
            if let Some(p) = out {
                inst.save(&p)?;
            }
        }
        Cmd::Run(args) => {
            let man = args.manifest()?;
            let res = run_experiment(&man)?;
            if res.reference == pcefold::harness::Reference::Incumbent {
                eprintln!("warning: oracle unproved at node limit; gaps are vs incumbent");
            }
            println!("condition,decoder,K,p_below_1pct,wilson_lo,wilson_hi,median_gap");
            for r in &res.summary {
                let m = &r.metrics;
                println!(
                    "{},{},{},{:.3},{:.3},{:.3},{:.3}",
                    r.condition.name(),
                    r.decoder.name(),
                    r.k,
                    m.p_below_1pct,
                    m.wilson_lo,
                    m.wilson_hi,
                    m.median_gap
                );
            }
        }
        Cmd::Sweep { run, axis, values } => {
            let man = run.manifest()?;
            let axis = match axis.to_ascii_lowercase().as_str() {
                "p" | "depth" => SweepAxis::P(list(&values)?),
                "k" => SweepAxis::K(list(&values)?),
                "topology" => SweepAxis::Topology(list(&values)?),
                other => bail!("unknown sweep axis {other:?}"),
            };
            let (rows, _) = sweep(&man, &axis)?;
            match &man.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    write_sweep_csv(&dir.join("sweep.csv"), &rows)?;
                }
                None => {
                    for r in &rows {
                        println!(
                            "{}={} {} {} K{} p={:.3} median={:.3} norm={:.3}{}",
                            r.axis,
                            r.value,
                            r.condition,
                            r.decoder,
                            r.k,
                            r.p_below_1pct,
                            r.median_gap,
                            r.normalized_gap,
                            if r.is_min { " *" } else { "" }
                        );
                    }
                }
            }
        }
        Cmd::Oracle {
            input,
            fold,
            node_limit,
        } => {
            let inst = load_instance(&input, &fold)?;
            let res = load_or_solve_oracle(&inst, node_limit, None)?;
            println!("{}", serde_json::to_string_pretty(&res)?);
        }
        Cmd::Decode {
            input,
            fold,
            evs,
            decoder,
            k,
            alpha,
            beta,
            sigma_noise,
            t_ls,
            seed,
        } => {
            let inst = load_instance(&input, &fold)?;
            let text = std::fs::read_to_string(&evs).with_context(|| format!("reading {}", evs.display()))?;
            let values: Vec<f64> = serde_json::from_str(&text)?;
            let params = DecodeParams {
                alpha,
                beta,
                sigma_noise,
                k,
                t_ls,
                seed,
            };
            let res = match decoder.parse::<DecoderKind>()? {
                DecoderKind::Sign => {
                    let bits = sign_round(&values);
                    serde_json::json!({
                        "bits": bits_to_string(&bits),
                        "energy": inst.energy(&bits)?,
                        "feasible": inst.is_feasible(&bits)?,
                    })
                }
                DecoderKind::SignLs => serde_json::to_value(sign_ls(&values, &inst, t_ls)?)?,
                DecoderKind::Pagd => serde_json::to_value(pagd_k(&values, &inst, &params)?)?,
            };
            println!("{}", serde_json::to_string_pretty(&res)?);
        }
        Cmd::Device { out } => {
            let text = serde_json::to_string_pretty(&DeviceGraph::two_hex())?;
            match out {
                Some(p) => std::fs::write(&p, text)?,
                None => println!("{text}"),
            }
        }
    }
    Ok(())
}
