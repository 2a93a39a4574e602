//! Tabular views of a sweep report, laid out like the published result tables.

use std::fmt::Write as _;
use std::path::Path;

use originnet_core::experiment::SweepReport;

use crate::error::{Error, Result};

pub const TABLE_HEADER: [&str; 8] = [
    "Network Architecture",
    "Optimizer",
    "MSE Training",
    "MSE Testing",
    "Accuracy Training (%)",
    "Accuracy Testing (%)",
    "R2 Training",
    "R2 Testing",
];

pub fn write_table_csv(path: &Path, report: &SweepReport) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(TABLE_HEADER).map_err(csv_err)?;
    for row in &report.suite {
        w.write_record([
            row.architecture.clone(),
            row.optimizer.to_string(),
            row.training.mse.to_string(),
            row.testing.mse.to_string(),
            row.training.accuracy.to_string(),
            row.testing.accuracy.to_string(),
            row.training.r2.to_string(),
            row.testing.r2.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Fixed-width summary for stdout.
pub fn render_table(report: &SweepReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:<9} {:>9} {:>9} {:>8} {:>8} {:>7} {:>7}",
        "network", "optimizer", "mse-trn", "mse-tst", "acc-trn", "acc-tst", "r2-trn", "r2-tst"
    );
    for row in &report.suite {
        let _ = writeln!(
            s,
            "{:<12} {:<9} {:>9.5} {:>9.5} {:>8.2} {:>8.2} {:>7.2} {:>7.2}",
            row.architecture,
            row.optimizer.to_string(),
            row.training.mse,
            row.testing.mse,
            row.training.accuracy,
            row.testing.accuracy,
            row.training.r2,
            row.testing.r2
        );
    }
    s
}
