//! Labeled concentration matrices, origin codes and the synthetic generator.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;

/// Known origins in their fixed code order: Java is `1000`, Toli-Toli `0001`.
pub const KNOWN_ORIGINS: [&str; 4] = ["Java", "Bali", "Manado", "Toli-Toli"];

/// Experiments × metabolites concentration table with per-row labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMatrix {
    values: Matrix,
    origins: Vec<String>,
    regions: Vec<String>,
}

impl RawMatrix {
    pub fn new(values: Matrix, origins: Vec<String>, regions: Vec<String>) -> Result<Self> {
        if values.cols() == 0 {
            return Err(Error::Empty("metabolite columns"));
        }
        for (what, len) in [("origin labels", origins.len()), ("region labels", regions.len())] {
            if len != values.rows() {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: values.rows(),
                    found: len,
                });
            }
        }
        for (r, row) in values.iter_rows().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                // `!(v >= 0)` also rejects NaN.
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::NegativeConcentration { row: r, col: c, value: v });
                }
            }
        }
        Ok(Self {
            values,
            origins,
            regions,
        })
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn origins(&self) -> &[String] {
        &self.origins
    }

    pub fn regions(&self) -> &[String] {
        &self.regions
    }

    pub fn n_samples(&self) -> usize {
        self.values.rows()
    }

    pub fn n_metabolites(&self) -> usize {
        self.values.cols()
    }

    pub(crate) fn with_values_unchecked(&self, values: Matrix) -> Self {
        Self {
            values,
            origins: self.origins.clone(),
            regions: self.regions.clone(),
        }
    }
}

/// One-hot origin code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OriginCode {
    pub name: String,
    pub code: Vec<u8>,
}

impl OriginCode {
    pub fn new(name: impl Into<String>, index: usize, width: usize) -> Self {
        let mut code = vec![0; width];
        code[index] = 1;
        Self {
            name: name.into(),
            code,
        }
    }

    pub fn index(&self) -> usize {
        self.code.iter().position(|&b| b == 1).unwrap_or(0)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.code.iter().map(|&b| f64::from(b)).collect()
    }
}

/// Encodes origin names as one-hot codes.
///
/// When every name is one of [`KNOWN_ORIGINS`] the vocabulary is that fixed
/// four-entry list, so codes are always four wide. Otherwise the vocabulary is
/// the distinct names in order of first appearance.
pub fn encode_origins<S: AsRef<str>>(origins: &[S]) -> Result<(Vec<OriginCode>, Vec<String>)> {
    if origins.is_empty() {
        return Err(Error::Empty("origin labels"));
    }
    let all_known = origins
        .iter()
        .all(|o| KNOWN_ORIGINS.contains(&o.as_ref()));
    let vocabulary: Vec<String> = if all_known {
        KNOWN_ORIGINS.iter().map(|s| s.to_string()).collect()
    } else {
        let mut v: Vec<String> = Vec::new();
        for o in origins {
            if !v.iter().any(|x| x == o.as_ref()) {
                v.push(o.as_ref().to_string());
            }
        }
        v
    };
    let codes = origins
        .iter()
        .map(|o| {
            let idx = vocabulary
                .iter()
                .position(|v| v == o.as_ref())
                .expect("vocabulary covers every name");
            OriginCode::new(o.as_ref(), idx, vocabulary.len())
        })
        .collect();
    Ok((codes, vocabulary))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginLayout {
    pub name: String,
    /// Experiments per region.
    pub regions: Vec<usize>,
}

/// Class/region layout for [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLayout {
    pub origins: Vec<OriginLayout>,
    pub n_metabolites: usize,
    pub biomarkers_per_origin: usize,
    /// Fraction of cells forced to exactly zero.
    pub zero_fraction: f64,
}

impl Default for SyntheticLayout {
    /// Four origins, three regions each, 94 × 47 in total. Java has regions of
    /// 8, 8 and 6 experiments; every other region has 8.
    fn default() -> Self {
        let origins = KNOWN_ORIGINS
            .iter()
            .map(|&name| OriginLayout {
                name: name.to_string(),
                regions: if name == "Java" { vec![8, 8, 6] } else { vec![8, 8, 8] },
            })
            .collect();
        Self {
            origins,
            n_metabolites: 47,
            biomarkers_per_origin: 4,
            zero_fraction: 0.06,
        }
    }
}

impl SyntheticLayout {
    pub fn n_samples(&self) -> usize {
        self.origins.iter().flat_map(|o| o.regions.iter()).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.origins.is_empty() {
            return Err(Error::InvalidLayout("no origins".into()));
        }
        if self.n_metabolites == 0 {
            return Err(Error::InvalidLayout("zero metabolites".into()));
        }
        for o in &self.origins {
            if o.regions.is_empty() {
                return Err(Error::InvalidLayout(format!("origin `{}` has zero regions", o.name)));
            }
            if o.regions.contains(&0) {
                return Err(Error::InvalidLayout(format!(
                    "origin `{}` has a region with zero experiments",
                    o.name
                )));
            }
        }
        if self.biomarkers_per_origin == 0
            || self.biomarkers_per_origin * self.origins.len() > self.n_metabolites
        {
            return Err(Error::InvalidLayout(format!(
                "{} biomarkers for each of {} origins do not fit in {} metabolites",
                self.biomarkers_per_origin,
                self.origins.len(),
                self.n_metabolites
            )));
        }
        if !(0.0..1.0).contains(&self.zero_fraction) {
            return Err(Error::InvalidLayout("zero_fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

// log10 ranges of the generated concentrations.
const BACKGROUND_LOG10: (f64, f64) = (-4.0, -1.0);
const BIOMARKER_LOG10: (f64, f64) = (0.0, 1.0);
const REGION_SHIFT_LOG10: f64 = 0.1;

/// Generates a labeled concentration matrix shaped like `layout`.
///
/// Each origin owns `biomarkers_per_origin` metabolite columns, disjoint from
/// every other origin's, where its samples are drawn log-uniformly from
/// 1..10. All other cells are drawn log-uniformly from 1e-4..0.1, and each
/// region applies a small per-metabolite multiplicative shift. Finally
/// `ceil(zero_fraction · cells)` non-biomarker cells are set to exactly 0.
/// All values stay within 1e-4..10 apart from the zeros.
pub fn generate_synthetic(seed: u64, layout: &SyntheticLayout) -> Result<RawMatrix> {
    layout.validate()?;
    let mut rng = rng::seeded(seed);
    let n_met = layout.n_metabolites;
    let n = layout.n_samples();

    let mut columns: Vec<usize> = (0..n_met).collect();
    columns.shuffle(&mut rng);
    let biomarkers: Vec<&[usize]> = columns
        .chunks(layout.biomarkers_per_origin)
        .take(layout.origins.len())
        .collect();

    let mut values = Matrix::zeros(n, n_met);
    let mut origins = Vec::with_capacity(n);
    let mut regions = Vec::with_capacity(n);
    let mut is_biomarker = vec![false; n * n_met];

    let mut row = 0;
    for (oi, origin) in layout.origins.iter().enumerate() {
        let own = biomarkers[oi];
        for (ri, &count) in origin.regions.iter().enumerate() {
            let shift: Vec<f64> = (0..n_met)
                .map(|_| rng.gen_range(-REGION_SHIFT_LOG10..=REGION_SHIFT_LOG10))
                .collect();
            for _ in 0..count {
                for c in 0..n_met {
                    let (lo, hi) = if own.contains(&c) {
                        is_biomarker[row * n_met + c] = true;
                        BIOMARKER_LOG10
                    } else {
                        BACKGROUND_LOG10
                    };
                    let exponent = (rng.gen_range(lo..=hi) + shift[c]).clamp(-4.0, 1.0);
                    values.set(row, c, libm::pow(10.0, exponent));
                }
                origins.push(origin.name.clone());
                regions.push(format!("{}-{}", origin.name, ri + 1));
                row += 1;
            }
        }
    }

    let candidates: Vec<usize> = (0..n * n_met).filter(|&i| !is_biomarker[i]).collect();
    let n_zero = libm::ceil(layout.zero_fraction * (n * n_met) as f64) as usize;
    let n_zero = n_zero.min(candidates.len());
    for k in index::sample(&mut rng, candidates.len(), n_zero) {
        let cell = candidates[k];
        values.as_mut_slice()[cell] = 0.0;
    }

    RawMatrix::new(values, origins, regions)
}
