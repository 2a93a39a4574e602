//! CSV matrices and JSON artifacts.
//!
//! Matrices use the header `origin,region,m1,...,mN`. Numbers are written in
//! Rust's shortest round-trip decimal form, so a written file reads back to
//! the identical `f64` values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use originnet_core::backprop::EpochRecord;
use originnet_core::matrix::Matrix;
use originnet_core::network::{Architecture, Layer, Mlp};
use originnet_core::preprocess::{PreprocessedDataset, Provenance};
use originnet_core::RawMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labels and values of a matrix file, before any domain validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub origins: Vec<String>,
    pub regions: Vec<String>,
    pub values: Matrix,
}

pub fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };

    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.len() < 3 || &header[0] != "origin" || &header[1] != "region" {
        return Err(Error::Header {
            path: path.to_path_buf(),
            reason: "expected `origin,region,` followed by at least one metabolite column".into(),
        });
    }
    let columns: Vec<String> = header.iter().skip(2).map(str::to_owned).collect();
    let width = columns.len();

    let (mut origins, mut regions, mut data) = (Vec::new(), Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                row: row + 1,
                expected: header.len(),
                found: rec.len(),
            });
        }
        origins.push(rec[0].to_owned());
        regions.push(rec[1].to_owned());
        for (c, field) in rec.iter().skip(2).enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row: row + 1,
                column: columns[c].clone(),
                value: field.to_owned(),
            })?;
            data.push(v);
        }
    }
    let values = Matrix::from_vec(origins.len(), width, data)?;
    Ok(Table {
        columns,
        origins,
        regions,
        values,
    })
}

/// Reads a raw concentration matrix. Concentrations must be finite and
/// non-negative.
pub fn load_csv(path: &Path) -> Result<RawMatrix> {
    let t = read_table(path)?;
    if t.origins.is_empty() {
        return Err(originnet_core::Error::Empty("data rows").into());
    }
    Ok(RawMatrix::new(t.values, t.origins, t.regions)?)
}

fn write_matrix(path: &Path, origins: &[String], regions: &[String], values: &Matrix) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut header = vec!["origin".to_owned(), "region".to_owned()];
    header.extend((1..=values.cols()).map(|i| format!("m{i}")));
    w.write_record(&header).map_err(csv_err)?;
    for (i, row) in values.iter_rows().enumerate() {
        let mut rec = Vec::with_capacity(row.len() + 2);
        rec.push(origins[i].clone());
        rec.push(regions[i].clone());
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_csv(path: &Path, m: &RawMatrix) -> Result<()> {
    write_matrix(path, m.origins(), m.regions(), m.values())
}

/// Sidecar path for a preprocessed matrix: `data.csv` → `data.provenance.json`.
pub fn provenance_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("provenance.json")
}

/// Writes normalized features as CSV plus the provenance sidecar.
pub fn write_preprocessed(path: &Path, ds: &PreprocessedDataset) -> Result<()> {
    let origins: Vec<String> = ds.targets.iter().map(|t| t.name.clone()).collect();
    write_matrix(path, &origins, &ds.regions, &ds.features)?;
    write_json(&provenance_path(path), &ds.provenance)
}

/// Reads features written by [`write_preprocessed`]. The sidecar is optional;
/// without it the provenance records the default pipeline settings.
pub fn load_preprocessed(path: &Path) -> Result<PreprocessedDataset> {
    let t = read_table(path)?;
    let side = provenance_path(path);
    let provenance: Provenance = if side.exists() {
        read_json(&side)?
    } else {
        log::warn!("{} not found; assuming default preprocessing provenance", side.display());
        Provenance {
            zero_replacement: originnet_core::preprocess::DEFAULT_ZERO_FLOOR,
            log_base: 10.0,
            normalization_axis: Default::default(),
            zeros_replaced: 0,
            constant_lines: Vec::new(),
        }
    };
    Ok(PreprocessedDataset::from_features(t.values, &t.origins, t.regions, provenance)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// On-disk network: layer sizes, slope and per-layer row-major weights
/// (`to × from`) with bias weight arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub architecture: Vec<usize>,
    pub sigma: f64,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    /// Origin names in output-neuron order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vocabulary: Vec<String>,
}

impl ModelFile {
    pub fn from_mlp(net: &Mlp, vocabulary: Vec<String>) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            architecture: net.architecture().sizes().to_vec(),
            sigma: net.sigma(),
            weights: net.layers().iter().map(|l| l.weights.as_slice().to_vec()).collect(),
            biases: net.layers().iter().map(|l| l.bias.clone()).collect(),
            vocabulary,
        }
    }

    pub fn to_mlp(&self) -> Result<Mlp> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion(self.format_version));
        }
        let arch = Architecture::new(self.architecture.clone())?;
        if self.weights.len() != self.biases.len() {
            return Err(originnet_core::Error::DimensionMismatch {
                what: "bias arrays",
                expected: self.weights.len(),
                found: self.biases.len(),
            }
            .into());
        }
        let layers = self
            .weights
            .iter()
            .zip(&self.biases)
            .zip(arch.sizes().windows(2))
            .map(|((w, b), dims)| {
                Ok(Layer {
                    weights: Matrix::from_vec(dims[1], dims[0], w.clone())?,
                    bias: b.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mlp::from_layers(arch, layers, self.sigma)?)
    }
}

pub fn save_model(path: &Path, net: &Mlp, vocabulary: &[String]) -> Result<()> {
    write_json(path, &ModelFile::from_mlp(net, vocabulary.to_vec()))
}

pub fn load_model(path: &Path) -> Result<(Mlp, Vec<String>)> {
    let f: ModelFile = read_json(path)?;
    Ok((f.to_mlp()?, f.vocabulary))
}

pub fn write_history(path: &Path, history: &[EpochRecord]) -> Result<()> {
    write_json(path, history)
}
