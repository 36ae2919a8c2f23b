//! Seeded end-to-end experiments: build, encode, train, decode, score.

mod manifest;
mod output;
mod run;
mod sweep;

pub use manifest::{
    default_depth, Condition, DecoderKind, DeviceConfig, ExperimentManifest, InputSpec, Prepared,
};
pub use output::{
    load_or_solve_oracle, write_loss_csv, write_results, write_summary_csv, write_sweep_csv,
    instance_hash,
};
pub use run::{
    best_of_k_violations, run_experiment, ExperimentResults, Reference, RunRecord, SummaryRow,
    SCHEMA_VERSION,
};
pub use sweep::{sweep, SweepAxis, SweepRow};
