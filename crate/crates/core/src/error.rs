use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("ragged matrix: row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("negative concentration {value} at row {row}, column {col}")]
    NegativeConcentration { row: usize, col: usize, value: f64 },

    #[error("non-positive entry {value} at row {row}, column {col} (replace zeros before the log transform)")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} has {width} entries; normalization needs at least 2")]
    RowTooShort { row: usize, width: usize },

    #[error("target column {dim} is constant; coefficient of determination is undefined")]
    DegenerateDenominator { dim: usize },

    #[error("split of {n} samples with train fraction {fraction} leaves an empty side")]
    DegenerateSplit { n: usize, fraction: f64 },

    #[error("invalid synthetic layout: {0}")]
    InvalidLayout(String),
}
