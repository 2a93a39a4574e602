//! Chain-rule gradients of the batch mean squared error and gradient descent
//! with momentum.
//!
//! The error minimized by both optimizers is
//! `E = 1/(m·n) · Σ_p Σ_k (T_kp − O_kp)²` over the `n` samples of a batch and
//! `m` output neurons, the same quantity reported by [`crate::metrics::mse`].
//! Its derivative keeps the full `2/(m·n)` factor.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{sigmoid_derivative, zero_layers, ForwardTrace, Layer, Mlp};
use crate::preprocess::LabeledSet;

pub const DEFAULT_LEARNING_RATE: f64 = 0.9;
pub const DEFAULT_MOMENTUM: f64 = 0.1;
pub const DEFAULT_MAX_EPOCHS: usize = 5000;
pub const DEFAULT_ERROR_TARGET: f64 = 1e-3;

/// `∂E/∂w` for every weight and bias weight, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub layers: Vec<Layer>,
}

impl Gradient {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            layers: zero_layers(net.architecture()),
        }
    }

    pub fn matches(&self, net: &Mlp) -> bool {
        self.layers.len() == net.layers().len()
            && self.layers.iter().zip(net.layers()).all(|(g, l)| g.same_shape(l))
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> + '_ {
        self.layers.iter().flat_map(Layer::params)
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(|&g| g == 0.0)
    }

    fn clear(&mut self) {
        for l in &mut self.layers {
            l.params_mut().for_each(|g| *g = 0.0);
        }
    }
}

pub(crate) fn check_set(net: &Mlp, data: &LabeledSet) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Empty("batch"));
    }
    if data.inputs.cols() != net.n_inputs() {
        return Err(Error::DimensionMismatch {
            what: "input width",
            expected: net.n_inputs(),
            found: data.inputs.cols(),
        });
    }
    if data.targets.cols() != net.n_outputs() {
        return Err(Error::DimensionMismatch {
            what: "target width",
            expected: net.n_outputs(),
            found: data.targets.cols(),
        });
    }
    Ok(())
}

/// Batch MSE of the raw (unthresholded) network outputs.
pub fn error(net: &Mlp, data: &LabeledSet) -> Result<f64> {
    check_set(net, data)?;
    let mut trace = ForwardTrace::for_architecture(net.architecture());
    let mut sse = 0.0;
    for (x, t) in data.iter() {
        net.forward_into(x, &mut trace)?;
        sse += squared_error(trace.output(), t);
    }
    Ok(sse / (data.len() * net.n_outputs()) as f64)
}

fn squared_error(o: &[f64], t: &[f64]) -> f64 {
    o.iter().zip(t).map(|(o, t)| (t - o) * (t - o)).sum()
}

/// Reusable buffers for gradient accumulation.
struct Workspace {
    trace: ForwardTrace,
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(net: &Mlp) -> Self {
        Self {
            trace: ForwardTrace::for_architecture(net.architecture()),
            deltas: net.architecture().sizes()[1..].iter().map(|&n| vec![0.0; n]).collect(),
        }
    }
}

/// Adds one sample's contribution `scale · ∂(Σ_k (T_k − O_k)²)/∂w` into
/// `grad` and returns the sample's squared error.
fn accumulate_sample(
    net: &Mlp,
    x: &[f64],
    t: &[f64],
    scale: f64,
    ws: &mut Workspace,
    grad: &mut Gradient,
) -> Result<f64> {
    net.forward_into(x, &mut ws.trace)?;
    let sigma = net.sigma();
    let n_layers = net.layers().len();
    let acts = &ws.trace.activations;

    // Output layer: ∂E/∂I_k = scale · (−2)(T_k − O_k) · σ·O_k(1 − O_k).
    let out = &acts[n_layers];
    let mut sse = 0.0;
    for (k, d) in ws.deltas[n_layers - 1].iter_mut().enumerate() {
        let diff = t[k] - out[k];
        sse += diff * diff;
        *d = -2.0 * scale * diff * sigmoid_derivative(out[k], sigma);
    }

    // Hidden layers, walking backwards through the chain rule.
    for l in (0..n_layers - 1).rev() {
        let (lower, upper) = ws.deltas.split_at_mut(l + 1);
        let next = &upper[0];
        let w_next = &net.layers()[l + 1].weights;
        let o = &acts[l + 1];
        for (j, d) in lower[l].iter_mut().enumerate() {
            let mut back = 0.0;
            for (k, dk) in next.iter().enumerate() {
                back += w_next.get(k, j) * dk;
            }
            *d = back * sigmoid_derivative(o[j], sigma);
        }
    }

    for (l, g) in grad.layers.iter_mut().enumerate() {
        let input = &acts[l];
        for (j, &d) in ws.deltas[l].iter().enumerate() {
            for (gw, &oi) in g.weights.row_mut(j).iter_mut().zip(input) {
                *gw += d * oi;
            }
            g.bias[j] += d;
        }
    }
    Ok(sse)
}

/// Batch MSE and its gradient in one pass. Samples are accumulated in index
/// order, so the result is bit-reproducible.
pub fn error_and_gradient(net: &Mlp, data: &LabeledSet) -> Result<(f64, Gradient)> {
    check_set(net, data)?;
    let mut grad = Gradient::zeros_like(net);
    let mut ws = Workspace::new(net);
    let denom = (data.len() * net.n_outputs()) as f64;
    let scale = 1.0 / denom;
    let mut sse = 0.0;
    for (x, t) in data.iter() {
        sse += accumulate_sample(net, x, t, scale, &mut ws, &mut grad)?;
    }
    Ok((sse / denom, grad))
}

pub fn gradient(net: &Mlp, data: &LabeledSet) -> Result<Gradient> {
    error_and_gradient(net, data).map(|(_, g)| g)
}

/// Previous weight deltas plus learning rate and momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub previous: Vec<Layer>,
    pub epsilon: f64,
    pub alpha: f64,
}

impl MomentumState {
    pub fn new(net: &Mlp, epsilon: f64, alpha: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter {
                name: "learning_rate",
                reason: format!("must lie in (0, 1), got {epsilon}"),
            });
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidParameter {
                name: "momentum",
                reason: format!("must lie in [0, 1), got {alpha}"),
            });
        }
        Ok(Self {
            previous: zero_layers(net.architecture()),
            epsilon,
            alpha,
        })
    }
}

/// Applies `Δw = −ε·g + α·Δw_prev` to every weight and bias weight and stores
/// `Δw` as the new previous step.
pub fn momentum_step(net: &mut Mlp, grad: &Gradient, state: &mut MomentumState) -> Result<()> {
    if !grad.matches(net)
        || state.previous.len() != grad.layers.len()
        || state.previous.iter().zip(&grad.layers).any(|(p, g)| !p.same_shape(g))
    {
        return Err(Error::DimensionMismatch {
            what: "gradient/state shape",
            expected: net.architecture().n_params(),
            found: grad.iter().count(),
        });
    }
    let (eps, alpha) = (state.epsilon, state.alpha);
    for ((layer, g), prev) in net
        .layers_mut()
        .iter_mut()
        .zip(&grad.layers)
        .zip(state.previous.iter_mut())
    {
        for ((w, &gi), p) in layer.params_mut().zip(g.params()).zip(prev.params_mut()) {
            let delta = -eps * gi + alpha * *p;
            *w += delta;
            *p = delta;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    /// One update per epoch from the gradient over the whole training set.
    #[default]
    Batch,
    /// One update per sample, in dataset order.
    Online,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackpropConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_epochs: usize,
    pub error_target: f64,
    pub mode: GradientMode,
}

impl Default for BackpropConfig {
    fn default() -> Self {
        Self {
            learning_rate: DEFAULT_LEARNING_RATE,
            momentum: DEFAULT_MOMENTUM,
            max_epochs: DEFAULT_MAX_EPOCHS,
            error_target: DEFAULT_ERROR_TARGET,
            mode: GradientMode::Batch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    MaxEpochs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// Number of updates applied before `mse` was measured.
    pub epoch: usize,
    pub mse: f64,
    /// Mean RPROP update value after this epoch's step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub epochs_used: usize,
    pub stop_reason: StopReason,
    pub final_mse: f64,
    pub history: Vec<EpochRecord>,
}

/// Shared epoch loop.
///
/// At each epoch `t` the batch MSE of the current weights is measured and
/// recorded. Training stops with [`StopReason::TargetReached`] at the first
/// `t` whose MSE is at most `error_target`, or with
/// [`StopReason::MaxEpochs`] once `max_epochs` updates have been applied.
/// Otherwise `step` performs one epoch of updates given the batch gradient
/// and returns an optional diagnostic.
pub(crate) fn train_loop(
    net: &mut Mlp,
    data: &LabeledSet,
    max_epochs: usize,
    error_target: f64,
    needs_gradient: bool,
    mut step: impl FnMut(&mut Mlp, Option<&Gradient>) -> Result<Option<f64>>,
) -> Result<TrainOutcome> {
    check_set(net, data)?;
    let mut history = Vec::with_capacity(max_epochs.min(1 << 16) + 1);
    let mut epoch = 0;
    loop {
        let (mse, grad) = if needs_gradient && epoch < max_epochs {
            let (e, g) = error_and_gradient(net, data)?;
            (e, Some(g))
        } else {
            (error(net, data)?, None)
        };
        if !mse.is_finite() {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: format!("training diverged at epoch {epoch} (mse = {mse})"),
            });
        }
        let record = EpochRecord {
            epoch,
            mse,
            mean_delta: None,
        };
        history.push(record);
        let stop = if mse <= error_target {
            Some(StopReason::TargetReached)
        } else if epoch >= max_epochs {
            Some(StopReason::MaxEpochs)
        } else {
            None
        };
        if let Some(stop_reason) = stop {
            return Ok(TrainOutcome {
                epochs_used: epoch,
                stop_reason,
                final_mse: mse,
                history,
            });
        }
        let diag = step(net, grad.as_ref())?;
        if let Some(last) = history.last_mut() {
            last.mean_delta = diag;
        }
        epoch += 1;
    }
}

/// Trains with gradient descent plus momentum until the error target or the
/// epoch limit is reached.
pub fn train_backprop(net: &mut Mlp, data: &LabeledSet, cfg: &BackpropConfig) -> Result<TrainOutcome> {
    let mut state = MomentumState::new(net, cfg.learning_rate, cfg.momentum)?;
    match cfg.mode {
        GradientMode::Batch => train_loop(net, data, cfg.max_epochs, cfg.error_target, true, |net, g| {
            momentum_step(net, g.expect("batch mode computes a gradient"), &mut state)?;
            Ok(None)
        }),
        GradientMode::Online => {
            let mut ws = Workspace::new(net);
            let mut grad = Gradient::zeros_like(net);
            let scale = 1.0 / net.n_outputs() as f64;
            train_loop(net, data, cfg.max_epochs, cfg.error_target, false, |net, _| {
                for (x, t) in data.iter() {
                    grad.clear();
                    accumulate_sample(net, x, t, scale, &mut ws, &mut grad)?;
                    momentum_step(net, &grad, &mut state)?;
                }
                Ok(None)
            })
        }
    }
}
