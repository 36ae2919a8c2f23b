//! Circuit training against the soft QUBO loss.

mod loss;
mod optimize;

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use loss::{
    ising_decomposition, ising_tanh_loss, logistic, qubo_sigmoid_grad, qubo_sigmoid_loss,
    soft_bits, IsingModel,
};
pub use optimize::{minimize, Minimum, Optimizer, TrustRegion};

use crate::ansatz::CircuitSpec;
use crate::encoding::EncodingMap;
use crate::rna::QuboInstance;
use crate::sim::{expectations, sample_expectations, simulate, EvVector};
use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    QuboSigmoid,
    IsingTanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub alpha: f64,
    /// Objective evaluations; 0 evaluates the initial point only.
    pub max_iters: usize,
    pub seed: u64,
    /// Initial angles are drawn from `[-init_range, init_range]`.
    pub init_range: f64,
    pub optimizer: Optimizer,
    pub loss: LossKind,
    /// Estimate EVs from this many shots per setting instead of exactly.
    pub shots: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 8.0,
            max_iters: 160,
            seed: 0,
            init_range: PI,
            optimizer: Optimizer::TrustRegionLinear,
            loss: LossKind::QuboSigmoid,
            shots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedResult {
    pub initial_params: Vec<f64>,
    pub initial_loss: f64,
    pub best_params: Vec<f64>,
    pub best_loss: f64,
    pub loss_trajectory: Vec<(usize, f64)>,
    pub final_evs: EvVector,
    pub iters_used: usize,
}

/// Seeded uniform initial angles.
pub fn initial_params(count: usize, seed: u64, range: f64) -> Vec<f64> {
    let mut r = rng::seeded(rng::derive_seed(seed, "init"));
    (0..count)
        .map(|_| if range > 0.0 { r.random_range(-range..=range) } else { 0.0 })
        .collect()
}

pub fn loss_value(kind: LossKind, evs: &[f64], inst: &QuboInstance, alpha: f64) -> Result<f64> {
    match kind {
        LossKind::QuboSigmoid => qubo_sigmoid_loss(evs, inst, alpha),
        LossKind::IsingTanh => ising_tanh_loss(evs, inst, alpha),
    }
}

fn circuit_evs(
    spec: &CircuitSpec,
    enc: &EncodingMap,
    params: &[f64],
    shots: Option<usize>,
    seed: u64,
) -> Result<EvVector> {
    let st = simulate(spec, params)?;
    match shots {
        None => expectations(&st, enc),
        Some(s) => sample_expectations(&st, enc, s, seed),
    }
}

pub fn train(
    spec: &CircuitSpec,
    enc: &EncodingMap,
    inst: &QuboInstance,
    cfg: &TrainConfig,
) -> Result<TrainedResult> {
    if enc.m() != inst.m() {
        return Err(Error::EncodingMismatch {
            expected: inst.m(),
            encoded: enc.m(),
        });
    }
    if spec.n != enc.n {
        return Err(Error::QubitMismatch {
            state: spec.n,
            encoding: enc.n,
        });
    }
    if !(cfg.alpha > 0.0) {
        return Err(Error::InvalidConfig(format!("alpha must be > 0, got {}", cfg.alpha)));
    }
    let x0 = initial_params(spec.param_count(), cfg.seed, cfg.init_range);
    let shot_seed = rng::derive_seed(cfg.seed, "shots");
    let calls = Cell::new(0u64);
    // EVs at the best point seen so far, so they need not be recomputed
    let best: RefCell<Option<(f64, EvVector)>> = RefCell::new(None);
    let objective = |x: &[f64]| -> Result<f64> {
        let k = calls.get();
        calls.set(k + 1);
        let evs = circuit_evs(spec, enc, x, cfg.shots, shot_seed.wrapping_add(k))?;
        let loss = loss_value(cfg.loss, &evs.values, inst, cfg.alpha)?;
        let mut b = best.borrow_mut();
        if b.as_ref().is_none_or(|(l, _)| loss < *l) {
            *b = Some((loss, evs));
        }
        Ok(loss)
    };
    // fail fast on dimension errors before handing off to the optimizer
    let initial_loss = objective(&x0)?;
    let take_evs = || best.borrow().as_ref().map(|(_, e)| e.clone()).expect("evaluated");

    if cfg.max_iters == 0 {
        return Ok(TrainedResult {
            initial_params: x0.clone(),
            initial_loss,
            best_params: x0,
            best_loss: initial_loss,
            loss_trajectory: vec![(0, initial_loss)],
            final_evs: take_evs(),
            iters_used: 0,
        });
    }

    // the optimizer starts at x0; replay its value instead of simulating again
    let mut first = Some(initial_loss);
    let found = minimize(
        |x| match first.take() {
            Some(v) => v,
            None => objective(x).unwrap_or(f64::INFINITY),
        },
        &x0,
        cfg.max_iters,
        cfg.seed,
        cfg.optimizer,
    );
    Ok(TrainedResult {
        initial_params: x0,
        initial_loss,
        best_params: found.x,
        best_loss: found.f,
        iters_used: found.trajectory.len(),
        loss_trajectory: found.trajectory,
        final_evs: take_evs(),
    })
}
