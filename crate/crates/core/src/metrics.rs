//! Identification accuracy, mean squared error and coefficient of
//! determination.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backprop::check_set;
use crate::error::{Error, Result};
use crate::ingest::OriginCode;
use crate::matrix::Matrix;
use crate::network::{threshold_outputs, ForwardTrace, Mlp};
use crate::preprocess::LabeledSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub accuracy_percent: f64,
    pub mse: f64,
    pub r2: f64,
    pub n_correct: usize,
    pub n_total: usize,
}

/// How a network output is judged against its one-hot target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchRule {
    /// The thresholded output vector must equal the target code exactly.
    #[default]
    Exact,
    /// The largest raw output must sit at the target's hot position.
    Argmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum R2Form {
    /// `1 − [(1/n)·SSE] / [(1/(n−1))·SST]`, the asymmetric form.
    #[default]
    Printed,
    /// `1 − SSE/SST`.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvalOptions {
    pub match_rule: MatchRule,
    pub r2_form: R2Form,
}

fn check_same_shape(outputs: &Matrix, targets: &Matrix) -> Result<()> {
    if outputs.rows() == 0 || outputs.cols() == 0 {
        return Err(Error::Empty("outputs"));
    }
    if outputs.rows() != targets.rows() {
        return Err(Error::DimensionMismatch {
            what: "target rows",
            expected: outputs.rows(),
            found: targets.rows(),
        });
    }
    if outputs.cols() != targets.cols() {
        return Err(Error::DimensionMismatch {
            what: "target width",
            expected: outputs.cols(),
            found: targets.cols(),
        });
    }
    Ok(())
}

/// Percentage of predictions whose binary vector equals the target code.
pub fn accuracy(predictions: &[Vec<u8>], targets: &[OriginCode]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "target count",
            expected: predictions.len(),
            found: targets.len(),
        });
    }
    let mut correct = 0;
    for (p, t) in predictions.iter().zip(targets) {
        if p.len() != t.code.len() {
            return Err(Error::DimensionMismatch {
                what: "code width",
                expected: t.code.len(),
                found: p.len(),
            });
        }
        correct += usize::from(*p == t.code);
    }
    Ok(percent(correct, predictions.len()))
}

fn percent(correct: usize, total: usize) -> f64 {
    100.0 * correct as f64 / total as f64
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

fn is_correct(output: &[f64], target: &[f64], rule: MatchRule) -> bool {
    match rule {
        MatchRule::Exact => threshold_outputs(output)
            .iter()
            .zip(target)
            .all(|(&o, &t)| f64::from(o) == t),
        MatchRule::Argmax => target[argmax(output)] == 1.0,
    }
}

/// Number of rows of raw `outputs` judged correct against `targets`.
pub fn count_correct(outputs: &Matrix, targets: &Matrix, rule: MatchRule) -> Result<usize> {
    check_same_shape(outputs, targets)?;
    Ok(outputs
        .iter_rows()
        .zip(targets.iter_rows())
        .filter(|(o, t)| is_correct(o, t, rule))
        .count())
}

/// `1/(m·n) · Σ Σ (T − O)²` over all samples and output neurons.
pub fn mse(outputs: &Matrix, targets: &Matrix) -> Result<f64> {
    check_same_shape(outputs, targets)?;
    let sse: f64 = outputs
        .as_slice()
        .iter()
        .zip(targets.as_slice())
        .map(|(o, t)| (t - o) * (t - o))
        .sum();
    Ok(sse / outputs.as_slice().len() as f64)
}

/// Per-output-dimension R²; `None` where the target column is constant.
fn r_squared_per_dim(outputs: &Matrix, targets: &Matrix, form: R2Form) -> Result<Vec<Option<f64>>> {
    check_same_shape(outputs, targets)?;
    let n = outputs.rows();
    if n < 2 {
        return Err(Error::DimensionMismatch {
            what: "samples for R² (at least)",
            expected: 2,
            found: n,
        });
    }
    let nf = n as f64;
    Ok((0..outputs.cols())
        .map(|p| {
            let mean = (0..n).map(|k| targets.get(k, p)).sum::<f64>() / nf;
            let (mut sse, mut sst) = (0.0, 0.0);
            for k in 0..n {
                let t = targets.get(k, p);
                let d = t - outputs.get(k, p);
                sse += d * d;
                sst += (t - mean) * (t - mean);
            }
            if sst == 0.0 {
                return None;
            }
            Some(match form {
                R2Form::Printed => 1.0 - (sse / nf) / (sst / (nf - 1.0)),
                R2Form::Standard => 1.0 - sse / sst,
            })
        })
        .collect())
}

/// Coefficient of determination averaged over output dimensions. Any
/// constant target column is an error.
pub fn r_squared(outputs: &Matrix, targets: &Matrix, form: R2Form) -> Result<f64> {
    let per_dim = r_squared_per_dim(outputs, targets, form)?;
    let mut sum = 0.0;
    for (dim, r) in per_dim.iter().enumerate() {
        sum += r.ok_or(Error::DegenerateDenominator { dim })?;
    }
    Ok(sum / per_dim.len() as f64)
}

/// Like [`r_squared`] but averages only over dimensions with non-constant
/// targets. A test split can miss an origin entirely, which makes that
/// column constant; those columns carry no R² information.
pub fn r_squared_available(outputs: &Matrix, targets: &Matrix, form: R2Form) -> Result<f64> {
    let per_dim = r_squared_per_dim(outputs, targets, form)?;
    let defined: Vec<f64> = per_dim.iter().flatten().copied().collect();
    if defined.is_empty() {
        return Err(Error::DegenerateDenominator { dim: 0 });
    }
    Ok(defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Raw network outputs for every row of `data`, one row per sample.
pub fn predict_all(net: &Mlp, data: &LabeledSet) -> Result<Matrix> {
    check_set(net, data)?;
    let mut trace = ForwardTrace::for_architecture(net.architecture());
    let mut out = Matrix::zeros(data.len(), net.n_outputs());
    for (i, x) in data.inputs.iter_rows().enumerate() {
        net.forward_into(x, &mut trace)?;
        out.row_mut(i).copy_from_slice(trace.output());
    }
    Ok(out)
}

/// Accuracy on thresholded outputs, MSE and R² on raw outputs.
pub fn evaluate(net: &Mlp, data: &LabeledSet, opts: EvalOptions) -> Result<EvalResult> {
    let outputs = predict_all(net, data)?;
    let n_correct = count_correct(&outputs, &data.targets, opts.match_rule)?;
    Ok(EvalResult {
        accuracy_percent: percent(n_correct, data.len()),
        mse: mse(&outputs, &data.targets)?,
        r2: r_squared_available(&outputs, &data.targets, opts.r2_form)?,
        n_correct,
        n_total: data.len(),
    })
}
