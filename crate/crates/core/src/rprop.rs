//! Resilient propagation.
//!
//! Every weight `w` carries an update value `Δ`, the gradient from the
//! previous epoch and the step it last applied. With `p = g_prev · g`:
//!
//! - `p > 0`: `Δ ← min(Δ·η⁺, Δmax)`, step `−sign(g)·Δ`, remember `g`.
//! - `p < 0`: `Δ ← max(Δ·η⁻, Δmin)`, undo the previous step, remember `0` so
//!   the next epoch does not adapt `Δ` again.
//! - `p = 0`: `Δ` unchanged, step `−sign(g)·Δ`, remember `g`.
//!
//! Updates happen once per epoch from the full-batch gradient.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backprop::{train_loop, Gradient, TrainOutcome, DEFAULT_ERROR_TARGET, DEFAULT_MAX_EPOCHS};
use crate::error::{Error, Result};
use crate::network::Mlp;
use crate::preprocess::LabeledSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpropConfig {
    pub eta_plus: f64,
    pub eta_minus: f64,
    pub delta_max: f64,
    pub delta_min: f64,
    pub delta_init: f64,
    pub max_epochs: usize,
    pub error_target: f64,
}

impl Default for RpropConfig {
    fn default() -> Self {
        Self {
            eta_plus: 1.2,
            eta_minus: 0.5,
            delta_max: 50.0,
            delta_min: 1e-6,
            delta_init: 0.1,
            max_epochs: DEFAULT_MAX_EPOCHS,
            error_target: DEFAULT_ERROR_TARGET,
        }
    }
}

impl RpropConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.eta_minus && self.eta_minus < 1.0 && 1.0 < self.eta_plus && self.eta_plus.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: format!(
                    "need 0 < eta_minus < 1 < eta_plus, got eta_minus = {}, eta_plus = {}",
                    self.eta_minus, self.eta_plus
                ),
            });
        }
        if !(0.0 < self.delta_min
            && self.delta_min <= self.delta_init
            && self.delta_init <= self.delta_max
            && self.delta_max.is_finite())
        {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!(
                    "need 0 < delta_min <= delta_init <= delta_max, got {} / {} / {}",
                    self.delta_min, self.delta_init, self.delta_max
                ),
            });
        }
        Ok(())
    }
}

/// Which branch of the update rule a weight took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpropCase {
    SameSign,
    SignChange,
    NoComparison,
}

/// Per-weight optimizer memory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightMemory {
    /// Update value `Δ`, always positive.
    pub delta: f64,
    pub prev_gradient: f64,
    /// Step applied to the weight at the previous epoch.
    pub prev_step: f64,
}

#[inline]
fn signed_step(g: f64, delta: f64) -> f64 {
    if g > 0.0 {
        -delta
    } else if g < 0.0 {
        delta
    } else {
        0.0
    }
}

/// Applies one update to a single weight.
pub fn update_weight(w: &mut f64, g: f64, mem: &mut WeightMemory, cfg: &RpropConfig) -> RpropCase {
    let p = mem.prev_gradient * g;
    if p > 0.0 {
        mem.delta = (mem.delta * cfg.eta_plus).min(cfg.delta_max);
        let step = signed_step(g, mem.delta);
        *w += step;
        mem.prev_step = step;
        mem.prev_gradient = g;
        RpropCase::SameSign
    } else if p < 0.0 {
        mem.delta = (mem.delta * cfg.eta_minus).max(cfg.delta_min);
        let step = -mem.prev_step;
        *w += step;
        mem.prev_step = step;
        mem.prev_gradient = 0.0;
        RpropCase::SignChange
    } else {
        let step = signed_step(g, mem.delta);
        *w += step;
        mem.prev_step = step;
        mem.prev_gradient = g;
        RpropCase::NoComparison
    }
}

/// Optimizer state for a whole network, one [`WeightMemory`] per parameter in
/// layer order (weights row-major, then bias weights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpropState {
    pub config: RpropConfig,
    pub memory: Vec<WeightMemory>,
}

impl RpropState {
    /// Fresh state: every `Δ = delta_init`, previous gradients and steps zero.
    pub fn new(net: &Mlp, config: RpropConfig) -> Result<Self> {
        config.validate()?;
        let memory = (0..net.architecture().n_params())
            .map(|_| WeightMemory {
                delta: config.delta_init,
                prev_gradient: 0.0,
                prev_step: 0.0,
            })
            .collect();
        Ok(Self { config, memory })
    }

    pub fn mean_delta(&self) -> f64 {
        self.memory.iter().map(|m| m.delta).sum::<f64>() / self.memory.len() as f64
    }
}

/// One epoch's update of every weight and bias weight.
pub fn rprop_step(net: &mut Mlp, grad: &Gradient, state: &mut RpropState) -> Result<()> {
    let n = net.architecture().n_params();
    if !grad.matches(net) || state.memory.len() != n {
        return Err(Error::DimensionMismatch {
            what: "rprop state size",
            expected: n,
            found: state.memory.len(),
        });
    }
    let cfg = state.config;
    let params = net.layers_mut().iter_mut().flat_map(|l| l.params_mut());
    for ((w, &g), mem) in params.zip(grad.iter()).zip(state.memory.iter_mut()) {
        update_weight(w, g, mem, &cfg);
    }
    Ok(())
}

/// Trains by epoch with RPROP until the error target or the epoch limit is
/// reached. History entries carry the mean update value after each step.
pub fn train_rprop(net: &mut Mlp, data: &LabeledSet, cfg: &RpropConfig) -> Result<TrainOutcome> {
    let mut state = RpropState::new(net, *cfg)?;
    train_loop(net, data, cfg.max_epochs, cfg.error_target, true, |net, g| {
        rprop_step(net, g.expect("rprop computes a gradient"), &mut state)?;
        Ok(Some(state.mean_delta()))
    })
}
