//! Sigmoid multilayer perceptron.
//!
//! Every non-input neuron `j` computes `I_j = Σ_i w_ji·O_i + w_Bj·O_B` with a
//! bias neuron output `O_B = 1`, then `O_j = 1 / (1 + exp(-σ·I_j))`. The input
//! layer passes features through unactivated.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;

pub const DEFAULT_SIGMA: f64 = 1.0;
pub const DEFAULT_INIT_HALF_WIDTH: f64 = 0.5;
/// Output of the bias neuron.
pub const BIAS_OUTPUT: f64 = 1.0;

/// Layer sizes from input to output, written `47-15-4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Architecture(Vec<usize>);

impl Architecture {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidArchitecture(format!(
                "need at least 2 layers, got {}",
                sizes.len()
            )));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidArchitecture(format!("layer {i} has zero neurons")));
        }
        Ok(Self(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn inputs(&self) -> usize {
        self.0[0]
    }

    pub fn outputs(&self) -> usize {
        *self.0.last().expect("at least two layers")
    }

    pub fn n_params(&self) -> usize {
        self.0.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
    }
}

impl TryFrom<Vec<usize>> for Architecture {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Architecture> for Vec<usize> {
    fn from(a: Architecture) -> Self {
        a.0
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    /// Parses dash-separated positive layer sizes such as `47-5-7-4`.
    fn from_str(s: &str) -> Result<Self> {
        let sizes = s
            .split('-')
            .map(|seg| {
                let seg = seg.trim();
                if seg.is_empty() {
                    return Err(Error::InvalidArchitecture(format!("empty segment in `{s}`")));
                }
                seg.parse::<usize>()
                    .map_err(|_| Error::InvalidArchitecture(format!("`{seg}` is not a positive integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sizes)
    }
}

/// Weights into one layer: `weights` is `to × from`, `bias` holds `w_Bj`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn zeros(from: usize, to: usize) -> Self {
        Self {
            weights: Matrix::zeros(to, from),
            bias: vec![0.0; to],
        }
    }

    pub fn same_shape(&self, other: &Layer) -> bool {
        self.weights.shape() == other.weights.shape() && self.bias.len() == other.bias.len()
    }

    /// All parameters, weights first (row-major) then bias weights.
    pub fn params(&self) -> impl Iterator<Item = &f64> + '_ {
        self.weights.as_slice().iter().chain(self.bias.iter())
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.weights.as_mut_slice().iter_mut().chain(self.bias.iter_mut())
    }
}

/// Zero-filled per-layer buffers shaped like `arch`.
pub fn zero_layers(arch: &Architecture) -> Vec<Layer> {
    arch.sizes().windows(2).map(|w| Layer::zeros(w[0], w[1])).collect()
}

/// Multilayer perceptron with sigmoid activations on every non-input layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    arch: Architecture,
    layers: Vec<Layer>,
    sigma: f64,
}

impl Mlp {
    pub fn from_layers(arch: Architecture, layers: Vec<Layer>, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        let expected = zero_layers(&arch);
        if layers.len() != expected.len() {
            return Err(Error::DimensionMismatch {
                what: "layer count",
                expected: expected.len(),
                found: layers.len(),
            });
        }
        for (l, e) in layers.iter().zip(&expected) {
            if !l.same_shape(e) {
                return Err(Error::InvalidArchitecture(format!(
                    "layer of shape {:?}+{} does not match {:?}+{}",
                    l.weights.shape(),
                    l.bias.len(),
                    e.weights.shape(),
                    e.bias.len()
                )));
            }
            if l.params().any(|w| !w.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "weights",
                    reason: String::from("non-finite weight"),
                });
            }
        }
        Ok(Self { arch, layers, sigma })
    }

    /// Network with every weight and bias weight drawn independently from
    /// `U[-half_width, half_width]`.
    pub fn init_weights(arch: &Architecture, seed: u64, half_width: f64, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidParameter {
                name: "init_half_width",
                reason: format!("must be positive and finite, got {half_width}"),
            });
        }
        let mut rng = rng::seeded(seed);
        let mut layers = zero_layers(arch);
        for layer in &mut layers {
            for w in layer.params_mut() {
                *w = rng.gen_range(-half_width..=half_width);
            }
        }
        Ok(Self {
            arch: arch.clone(),
            layers,
            sigma,
        })
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n_inputs(&self) -> usize {
        self.arch.inputs()
    }

    pub fn n_outputs(&self) -> usize {
        self.arch.outputs()
    }

    pub fn forward(&self, x: &[f64]) -> Result<ForwardTrace> {
        let mut trace = ForwardTrace::for_architecture(&self.arch);
        self.forward_into(x, &mut trace)?;
        Ok(trace)
    }

    /// Forward pass reusing a trace allocated for this architecture.
    pub fn forward_into(&self, x: &[f64], trace: &mut ForwardTrace) -> Result<()> {
        if x.len() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                what: "input width",
                expected: self.n_inputs(),
                found: x.len(),
            });
        }
        trace.activations[0].copy_from_slice(x);
        for (l, layer) in self.layers.iter().enumerate() {
            let (before, after) = trace.activations.split_at_mut(l + 1);
            let input = &before[l];
            let out = &mut after[0];
            let pre = &mut trace.pre_activations[l];
            for j in 0..layer.bias.len() {
                let w = layer.weights.row(j);
                let mut net = layer.bias[j] * BIAS_OUTPUT;
                for (wi, oi) in w.iter().zip(input.iter()) {
                    net += wi * oi;
                }
                pre[j] = net;
                out[j] = sigmoid(net, self.sigma);
            }
        }
        Ok(())
    }

    /// Raw output activations for one sample.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(x)?.activations.pop().unwrap_or_default())
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: format!("must be positive and finite, got {sigma}"),
        });
    }
    Ok(())
}

/// Pre-activations and activations of one forward pass.
///
/// `activations[0]` is the input vector; `pre_activations[l]` and
/// `activations[l + 1]` belong to the `l`-th weight layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub pre_activations: Vec<Vec<f64>>,
    pub activations: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn for_architecture(arch: &Architecture) -> Self {
        let sizes = arch.sizes();
        Self {
            pre_activations: sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
            activations: sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("at least two layers")
    }
}

/// Logistic function with slope `sigma`, `1 / (1 + exp(-sigma·x))`.
///
/// The two branches keep `exp` from overflowing: for `sigma·x >= 0` the
/// textbook form is used, otherwise `e / (1 + e)` with `e = exp(sigma·x)`.
/// The result never becomes NaN; it rounds to exactly 1.0 once
/// `sigma·x > ~36.7` and underflows towards 0 only below `~-745`.
#[inline]
pub fn sigmoid(x: f64, sigma: f64) -> f64 {
    let t = sigma * x;
    if t >= 0.0 {
        1.0 / (1.0 + libm::exp(-t))
    } else {
        let e = libm::exp(t);
        e / (1.0 + e)
    }
}

/// `d sigmoid / d x` expressed through the activation `o`.
#[inline]
pub fn sigmoid_derivative(o: f64, sigma: f64) -> f64 {
    sigma * o * (1.0 - o)
}

/// Output-layer threshold: 1 when the activation is at least 0.5.
pub fn threshold_outputs(o: &[f64]) -> Vec<u8> {
    o.iter().map(|&v| u8::from(v >= 0.5)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_architecture_strings() {
        assert_eq!("47-15-4".parse::<Architecture>().unwrap().sizes(), &[47, 15, 4]);
        assert_eq!("2-1".parse::<Architecture>().unwrap().sizes(), &[2, 1]);
        for bad in ["47--4", "", "4", "4-0-2", "3-x", "-3-2", "3--2", "3-2-"] {
            assert!(bad.parse::<Architecture>().is_err(), "{bad}");
        }
    }

    #[test]
    fn architecture_round_trips_display() {
        let a: Architecture = "47-5-7-4".parse().unwrap();
        assert_eq!(alloc::string::ToString::to_string(&a), "47-5-7-4");
    }

    #[test]
    fn init_shapes_and_bounds() {
        let arch: Architecture = "47-15-4".parse().unwrap();
        let net = Mlp::init_weights(&arch, 3, 0.5, 1.0).unwrap();
        assert_eq!(net.layers()[0].weights.shape(), (15, 47));
        assert_eq!(net.layers()[1].weights.shape(), (4, 15));
        assert_eq!(net.layers()[0].bias.len(), 15);
        assert_eq!(net.layers()[1].bias.len(), 4);
        assert!(net.layers().iter().flat_map(Layer::params).all(|w| (-0.5..=0.5).contains(w)));
        assert_eq!(net, Mlp::init_weights(&arch, 3, 0.5, 1.0).unwrap());
        assert_ne!(net, Mlp::init_weights(&arch, 4, 0.5, 1.0).unwrap());
    }

    #[test]
    fn init_rejects_bad_parameters() {
        let arch: Architecture = "2-1".parse().unwrap();
        assert!(Mlp::init_weights(&arch, 0, 0.0, 1.0).is_err());
        assert!(Mlp::init_weights(&arch, 0, 0.5, 0.0).is_err());
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0, 1.0), 0.5);
        assert_eq!(sigmoid(0.0, 7.0), 0.5);
        // 1 / (1 + e^-10) = 0.999954602131297...
        assert!((sigmoid(10.0, 1.0) - 0.999_954_6).abs() < 1e-7);
        assert!((sigmoid(10.0, 1.0) - 0.999_954_602_131_297_6).abs() < 1e-15);
        assert!(sigmoid(-1000.0, 1.0) >= 0.0);
        assert_eq!(sigmoid(1000.0, 1.0), 1.0);
        assert!(!sigmoid(f64::MAX, 2.0).is_nan());
    }

    #[test]
    fn zero_weights_give_half() {
        let arch: Architecture = "3-4-2".parse().unwrap();
        let net = Mlp::from_layers(arch.clone(), zero_layers(&arch), 1.0).unwrap();
        let t = net.forward(&[0.3, -2.0, 5.0]).unwrap();
        assert!(t.activations[1..].iter().flatten().all(|&o| o == 0.5));
    }

    #[test]
    fn single_neuron_zero_input() {
        let arch: Architecture = "1-1".parse().unwrap();
        let mut layers = zero_layers(&arch);
        layers[0].weights.set(0, 0, 1.0);
        let net = Mlp::from_layers(arch, layers, 1.0).unwrap();
        assert_eq!(net.predict(&[0.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let arch: Architecture = "3-2".parse().unwrap();
        let net = Mlp::init_weights(&arch, 0, 0.5, 1.0).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn threshold_rule() {
        assert_eq!(threshold_outputs(&[0.5]), vec![1]);
        assert_eq!(threshold_outputs(&[0.499]), vec![0]);
        assert_eq!(threshold_outputs(&[0.9, 0.2, 0.51, 0.5]), vec![1, 0, 1, 1]);
    }

    #[test]
    fn from_layers_checks_shapes() {
        let arch: Architecture = "3-2".parse().unwrap();
        let other: Architecture = "2-2".parse().unwrap();
        assert!(Mlp::from_layers(arch, zero_layers(&other), 1.0).is_err());
    }
}
