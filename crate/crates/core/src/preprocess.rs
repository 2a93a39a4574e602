//! Zero replacement, `log10` transform and z-score normalization.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{encode_origins, OriginCode, RawMatrix};
use crate::matrix::Matrix;

/// Substitute for exact-zero concentrations, one decade below the smallest
/// measurable value.
pub const DEFAULT_ZERO_FLOOR: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormAxis {
    /// Each experiment (row) is centered and scaled by its own statistics.
    #[default]
    Row,
    /// Each metabolite (column) is centered and scaled across experiments.
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub zero_floor: f64,
    pub axis: NormAxis,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            zero_floor: DEFAULT_ZERO_FLOOR,
            axis: NormAxis::Row,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub zero_replacement: f64,
    pub log_base: f64,
    pub normalization_axis: NormAxis,
    pub zeros_replaced: usize,
    /// Rows (or columns, for column normalization) that were constant before
    /// normalization and were mapped to zeros.
    pub constant_lines: Vec<usize>,
}

/// Network-ready features with one-hot targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessedDataset {
    pub features: Matrix,
    pub targets: Vec<OriginCode>,
    pub vocabulary: Vec<alloc::string::String>,
    pub regions: Vec<alloc::string::String>,
    pub provenance: Provenance,
}

impl PreprocessedDataset {
    /// Builds a dataset from already-normalized features.
    pub fn from_features<S: AsRef<str>>(
        features: Matrix,
        origins: &[S],
        regions: Vec<alloc::string::String>,
        provenance: Provenance,
    ) -> Result<Self> {
        if origins.len() != features.rows() {
            return Err(Error::DimensionMismatch {
                what: "origin labels",
                expected: features.rows(),
                found: origins.len(),
            });
        }
        let (targets, vocabulary) = encode_origins(origins)?;
        Ok(Self {
            features,
            targets,
            vocabulary,
            regions,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.rows() == 0
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn class_indices(&self) -> Vec<usize> {
        self.targets.iter().map(OriginCode::index).collect()
    }

    /// Training view over every sample.
    pub fn labeled(&self) -> LabeledSet {
        let all: Vec<usize> = (0..self.len()).collect();
        self.subset(&all)
    }

    /// Training view over the listed samples, in the given order.
    pub fn subset(&self, indices: &[usize]) -> LabeledSet {
        let width = self.n_classes();
        let mut targets = Matrix::zeros(indices.len(), width);
        for (r, &i) in indices.iter().enumerate() {
            targets.row_mut(r).copy_from_slice(&self.targets[i].as_f64());
        }
        LabeledSet {
            inputs: self.features.select_rows(indices),
            targets,
        }
    }
}

/// Paired input and target rows, the unit every trainer and metric consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSet {
    pub inputs: Matrix,
    pub targets: Matrix,
}

impl LabeledSet {
    pub fn new(inputs: Matrix, targets: Matrix) -> Result<Self> {
        if inputs.rows() != targets.rows() {
            return Err(Error::DimensionMismatch {
                what: "target rows",
                expected: inputs.rows(),
                found: targets.rows(),
            });
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.rows() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], &[f64])> + '_ {
        self.inputs.iter_rows().zip(self.targets.iter_rows())
    }
}

/// Replaces every exact zero with `floor`.
pub fn replace_zeros(m: &RawMatrix, floor: f64) -> Result<RawMatrix> {
    if !(floor > 0.0) || !floor.is_finite() {
        return Err(Error::InvalidParameter {
            name: "zero_floor",
            reason: alloc::format!("must be positive and finite, got {floor}"),
        });
    }
    let values = m.values().map(|v| if v == 0.0 { floor } else { v });
    Ok(m.with_values_unchecked(values))
}

fn count_zeros(m: &Matrix) -> usize {
    m.as_slice().iter().filter(|&&v| v == 0.0).count()
}

/// Elementwise `log10`. Fails on any non-positive entry.
pub fn log_transform(m: &Matrix) -> Result<Matrix> {
    for (r, row) in m.iter_rows().enumerate() {
        if let Some(c) = row.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::NonPositiveEntry {
                row: r,
                col: c,
                value: row[c],
            });
        }
    }
    Ok(m.map(libm::log10))
}

/// Sample mean and sample standard deviation (denominator `n - 1`).
pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (mean, libm::sqrt(ss / (n - 1.0)))
}

/// z-scores `xs` in place; returns `false` (and writes zeros) when the line is
/// constant.
fn standardize(xs: &mut [f64]) -> bool {
    if xs.iter().all(|&x| x == xs[0]) {
        xs.fill(0.0);
        return false;
    }
    let (mean, s) = mean_and_std(xs);
    for x in xs.iter_mut() {
        *x = (*x - mean) / s;
    }
    true
}

/// Per-row z-score: `z = (x - mean_row) / s_row` with the `n - 1` sample
/// standard deviation. Constant rows become all zeros and are reported in
/// the returned index list.
pub fn normalize_rows(m: &Matrix) -> Result<(Matrix, Vec<usize>)> {
    if m.cols() < 2 {
        return Err(Error::RowTooShort {
            row: 0,
            width: m.cols(),
        });
    }
    let mut out = m.clone();
    let mut constant = Vec::new();
    for r in 0..out.rows() {
        if !standardize(out.row_mut(r)) {
            constant.push(r);
        }
    }
    Ok((out, constant))
}

/// Per-column z-score, the non-default axis.
pub fn normalize_columns(m: &Matrix) -> Result<(Matrix, Vec<usize>)> {
    if m.rows() < 2 {
        return Err(Error::RowTooShort {
            row: 0,
            width: m.rows(),
        });
    }
    let mut out = m.clone();
    let mut constant = Vec::new();
    for c in 0..m.cols() {
        let mut col = m.column(c);
        if !standardize(&mut col) {
            constant.push(c);
        }
        for (r, v) in col.into_iter().enumerate() {
            out.set(r, c, v);
        }
    }
    Ok((out, constant))
}

/// Zero replacement, `log10`, normalization and origin encoding, in that order.
pub fn preprocess_pipeline(m: &RawMatrix, cfg: &PreprocessConfig) -> Result<PreprocessedDataset> {
    let zeros_replaced = count_zeros(m.values());
    let floored = replace_zeros(m, cfg.zero_floor)?;
    let logged = log_transform(floored.values())?;
    let (features, constant_lines) = match cfg.axis {
        NormAxis::Row => normalize_rows(&logged)?,
        NormAxis::Column => normalize_columns(&logged)?,
    };
    let provenance = Provenance {
        zero_replacement: cfg.zero_floor,
        log_base: 10.0,
        normalization_axis: cfg.axis,
        zeros_replaced,
        constant_lines,
    };
    PreprocessedDataset::from_features(features, m.origins(), m.regions().to_vec(), provenance)
}
