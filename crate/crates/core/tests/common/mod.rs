//! Test-only reference implementations, written independently of the crate's
//! forward and gradient code.

#![allow(dead_code)]

use originnet_core::matrix::Matrix;
use originnet_core::network::{Architecture, Mlp};
use originnet_core::preprocess::LabeledSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Straight-line forward pass from nested weight vectors.
pub fn oracle_forward(net: &Mlp, x: &[f64]) -> Vec<f64> {
    let sigma = net.sigma();
    let mut o: Vec<f64> = x.to_vec();
    for layer in net.layers() {
        let (to, from) = layer.weights.shape();
        let mut next = vec![0.0; to];
        for j in 0..to {
            let mut s = layer.bias[j];
            for i in 0..from {
                s += layer.weights.get(j, i) * o[i];
            }
            next[j] = 1.0 / (1.0 + (-sigma * s).exp());
        }
        o = next;
    }
    o
}

/// `1/(m·n) Σ Σ (T − O)²` via [`oracle_forward`].
pub fn oracle_loss(net: &Mlp, data: &LabeledSet) -> f64 {
    let mut sse = 0.0;
    let mut count = 0usize;
    for (x, t) in data.iter() {
        let o = oracle_forward(net, x);
        for (oi, ti) in o.iter().zip(t) {
            sse += (ti - oi).powi(2);
            count += 1;
        }
    }
    sse / count as f64
}

/// Central-difference gradient, parameters in layer order (weights
/// row-major, then bias weights).
pub fn finite_difference_gradient(net: &Mlp, data: &LabeledSet, h: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let n_layers = net.layers().len();
    for l in 0..n_layers {
        let n_params = net.layers()[l].params().count();
        for p in 0..n_params {
            let mut plus = net.clone();
            let mut minus = net.clone();
            *plus.layers_mut()[l].params_mut().nth(p).unwrap() += h;
            *minus.layers_mut()[l].params_mut().nth(p).unwrap() -= h;
            out.push((oracle_loss(&plus, data) - oracle_loss(&minus, data)) / (2.0 * h));
        }
    }
    out
}

/// Relative comparison with an absolute floor for near-zero components.
pub fn grad_close(analytic: f64, numeric: f64, rel: f64, abs_floor: f64) -> bool {
    let diff = (analytic - numeric).abs();
    diff <= abs_floor || diff <= rel * analytic.abs().max(numeric.abs())
}

pub fn random_net(rng: &mut ChaCha8Rng, sizes: Vec<usize>, sigma: f64) -> Mlp {
    let arch = Architecture::new(sizes).unwrap();
    Mlp::init_weights(&arch, rng.gen(), 1.0, sigma).unwrap()
}

pub fn random_batch(rng: &mut ChaCha8Rng, inputs: usize, outputs: usize, n: usize) -> LabeledSet {
    let x: Vec<f64> = (0..n * inputs).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let t: Vec<f64> = (0..n * outputs).map(|_| f64::from(rng.gen_bool(0.5) as u8)).collect();
    LabeledSet::new(
        Matrix::from_vec(n, inputs, x).unwrap(),
        Matrix::from_vec(n, outputs, t).unwrap(),
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// XOR with a single output.
pub fn xor() -> LabeledSet {
    LabeledSet::new(
        Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap(),
        Matrix::from_rows(&[[0.0], [1.0], [1.0], [0.0]]).unwrap(),
    )
    .unwrap()
}
