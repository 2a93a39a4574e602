//! Sweep execution across a bounded thread pool.
//!
//! Runs are independent: each `(entry, run_id)` pair derives its own seeds, so
//! the pool only changes wall-clock time. Results are joined back in suite
//! order and run-id order before aggregation.

use originnet_core::experiment::{aggregate, run_single, ProtocolConfig, SweepEntry, SweepReport, SweepRow};
use originnet_core::preprocess::PreprocessedDataset;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub fn run_sweep(
    data: &PreprocessedDataset,
    suite: &[SweepEntry],
    cfg: &ProtocolConfig,
    master_seed: u64,
    jobs: usize,
) -> Result<SweepReport> {
    if suite.is_empty() {
        return Err(originnet_core::Error::Empty("sweep suite").into());
    }
    if cfg.repeats == 0 {
        return Err(Error::Usage("--repeats must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {jobs} worker threads: {e}")))?;

    let work: Vec<(usize, usize)> = (0..suite.len())
        .flat_map(|e| (0..cfg.repeats).map(move |r| (e, r)))
        .collect();
    let results = pool.install(|| {
        work.par_iter()
            .map(|&(e, r)| {
                let report = run_single(data, &suite[e], cfg, master_seed, r)?;
                log::debug!(
                    "{} run {r}: train {:.2}% test {:.2}% after {} epochs",
                    suite[e].key(),
                    report.training.accuracy_percent,
                    report.testing.accuracy_percent,
                    report.epochs_used
                );
                Ok(report)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::with_capacity(suite.len());
    for (entry, runs) in suite.iter().zip(results.chunks(cfg.repeats)) {
        let agg = aggregate(entry, runs)?;
        log::info!(
            "{}: train {:.2}% / test {:.2}%",
            entry.key(),
            agg.training.accuracy,
            agg.testing.accuracy
        );
        rows.push(SweepRow::from_runs(agg, runs.to_vec()));
    }
    Ok(SweepReport {
        master_seed,
        config: *cfg,
        suite: rows,
    })
}
