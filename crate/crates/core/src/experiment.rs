//! Repeated random-split protocol, run aggregation and the architecture
//! sweep.
//!
//! Each run draws its own train/test split and initial weights from seeds
//! derived from `(master_seed, run_id, entry)`, where the entry is the
//! architecture/optimizer pair. Results therefore do not depend on how runs or
//! sweep entries are ordered or scheduled.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::backprop::{train_backprop, BackpropConfig, StopReason, TrainOutcome};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, EvalOptions, EvalResult};
use crate::network::{Architecture, Mlp, DEFAULT_INIT_HALF_WIDTH, DEFAULT_SIGMA};
use crate::preprocess::PreprocessedDataset;
use crate::rng::{self, derive_seed};
use crate::rprop::{train_rprop, RpropConfig};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
pub const DEFAULT_REPEATS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub train_fraction: f64,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

fn train_size(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "train_fraction",
            reason: format!("must lie in (0, 1), got {fraction}"),
        });
    }
    let n_train = libm::round(fraction * n as f64) as usize;
    if n < 2 || n_train == 0 || n_train >= n {
        return Err(Error::DegenerateSplit { n, fraction });
    }
    Ok(n_train)
}

/// Uniform random split of `0..n` with `round(fraction · n)` training
/// samples. Both index lists are returned sorted.
pub fn make_split(n: usize, fraction: f64, seed: u64) -> Result<SplitPlan> {
    let n_train = train_size(n, fraction)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(seed));
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPlan {
        seed,
        train_fraction: fraction,
        train_indices: train,
        test_indices: test,
    })
}

/// Split that preserves class proportions. Each class receives the floor of
/// its share of `round(fraction · n)`; leftover training slots go to the
/// classes with the largest remainders (ties to the lower class index).
pub fn make_stratified_split(classes: &[usize], fraction: f64, seed: u64) -> Result<SplitPlan> {
    let n = classes.len();
    let n_train = train_size(n, fraction)?;
    let n_classes = classes.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = (0..n_classes).map(|_| Vec::new()).collect();
    for (i, &c) in classes.iter().enumerate() {
        members[c].push(i);
    }
    let exact: Vec<f64> = members
        .iter()
        .map(|m| m.len() as f64 * n_train as f64 / n as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|&e| libm::floor(e) as usize).collect();
    let mut order: Vec<usize> = (0..n_classes).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - quota[a] as f64;
        let rb = exact[b] - quota[b] as f64;
        rb.partial_cmp(&ra).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let mut missing = n_train - quota.iter().sum::<usize>();
    for &c in order.iter().cycle() {
        if missing == 0 {
            break;
        }
        if quota[c] < members[c].len() {
            quota[c] += 1;
            missing -= 1;
        }
    }

    let mut rng = rng::seeded(seed);
    let (mut train, mut test) = (Vec::with_capacity(n_train), Vec::with_capacity(n - n_train));
    for (c, m) in members.iter_mut().enumerate() {
        m.shuffle(&mut rng);
        train.extend_from_slice(&m[..quota[c]]);
        test.extend_from_slice(&m[quota[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPlan {
        seed,
        train_fraction: fraction,
        train_indices: train,
        test_indices: test,
    })
}

/// Hidden-layer size rule of thumb `sqrt(n_in · n_out)`, unrounded.
pub fn shibata_hidden(n_in: usize, n_out: usize) -> f64 {
    libm::sqrt((n_in * n_out) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Backprop,
    Rprop,
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Backprop => "backprop",
            Self::Rprop => "rprop",
        })
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backprop" => Ok(Self::Backprop),
            "rprop" => Ok(Self::Rprop),
            other => Err(Error::InvalidParameter {
                name: "optimizer",
                reason: format!("unknown optimizer `{other}` (expected backprop or rprop)"),
            }),
        }
    }
}

/// Hyperparameters of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub train_fraction: f64,
    pub repeats: usize,
    pub stratified: bool,
    pub sigma: f64,
    pub init_half_width: f64,
    pub backprop: BackpropConfig,
    pub rprop: RpropConfig,
    pub eval: EvalOptions,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            train_fraction: DEFAULT_TRAIN_FRACTION,
            repeats: DEFAULT_REPEATS,
            stratified: false,
            sigma: DEFAULT_SIGMA,
            init_half_width: DEFAULT_INIT_HALF_WIDTH,
            backprop: BackpropConfig::default(),
            rprop: RpropConfig::default(),
            eval: EvalOptions::default(),
        }
    }
}

/// Initializes and trains a network with the configured optimizer.
pub fn train_network(
    net: &mut Mlp,
    data: &crate::preprocess::LabeledSet,
    optimizer: OptimizerKind,
    cfg: &ProtocolConfig,
) -> Result<TrainOutcome> {
    match optimizer {
        OptimizerKind::Backprop => train_backprop(net, data, &cfg.backprop),
        OptimizerKind::Rprop => train_rprop(net, data, &cfg.rprop),
    }
}

/// One architecture/optimizer combination.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SweepEntry {
    pub architecture: Architecture,
    pub optimizer: OptimizerKind,
}

impl SweepEntry {
    pub fn new(architecture: Architecture, optimizer: OptimizerKind) -> Self {
        Self {
            architecture,
            optimizer,
        }
    }

    /// Identity string used for seed derivation, e.g. `47-15-4/backprop`.
    pub fn key(&self) -> String {
        format!("{}/{}", self.architecture, self.optimizer)
    }
}

/// Backprop and RPROP, each over 47-3-5-4, 47-4-6-4, 47-5-7-4, 47-6-8-4 and
/// 47-15-4.
pub fn default_suite() -> Vec<SweepEntry> {
    const ARCHS: [&str; 5] = ["47-3-5-4", "47-4-6-4", "47-5-7-4", "47-6-8-4", "47-15-4"];
    [OptimizerKind::Backprop, OptimizerKind::Rprop]
        .into_iter()
        .flat_map(|opt| {
            ARCHS
                .iter()
                .map(move |a| SweepEntry::new(a.parse().expect("valid built-in architecture"), opt))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: usize,
    pub architecture: String,
    pub optimizer: OptimizerKind,
    pub split_seed: u64,
    pub init_seed: u64,
    pub training: EvalResult,
    pub testing: EvalResult,
    pub epochs_used: usize,
    pub stop_reason: StopReason,
    pub final_training_mse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricMeans {
    pub mse: f64,
    pub accuracy: f64,
    pub r2: f64,
}

impl MetricMeans {
    fn of<'a>(results: impl Iterator<Item = &'a EvalResult> + Clone) -> Self {
        let n = results.clone().count() as f64;
        Self {
            mse: results.clone().map(|r| r.mse).sum::<f64>() / n,
            accuracy: results.clone().map(|r| r.accuracy_percent).sum::<f64>() / n,
            r2: results.map(|r| r.r2).sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub architecture: String,
    pub optimizer: OptimizerKind,
    pub run_count: usize,
    pub training: MetricMeans,
    pub testing: MetricMeans,
    pub mean_epochs: f64,
}

fn check_entry(data: &PreprocessedDataset, entry: &SweepEntry) -> Result<()> {
    let arch = &entry.architecture;
    if arch.inputs() != data.n_features() {
        return Err(Error::DimensionMismatch {
            what: "architecture input layer vs. feature count",
            expected: data.n_features(),
            found: arch.inputs(),
        });
    }
    if arch.outputs() != data.n_classes() {
        return Err(Error::DimensionMismatch {
            what: "architecture output layer vs. origin count",
            expected: data.n_classes(),
            found: arch.outputs(),
        });
    }
    Ok(())
}

/// Run `run_id` of the protocol for one entry: split, initialize, train on
/// the training part and evaluate both parts.
pub fn run_single(
    data: &PreprocessedDataset,
    entry: &SweepEntry,
    cfg: &ProtocolConfig,
    master_seed: u64,
    run_id: usize,
) -> Result<RunReport> {
    check_entry(data, entry)?;
    let key = entry.key();
    let split_seed = derive_seed(master_seed, run_id as u64, &format!("{key}/split"));
    let init_seed = derive_seed(master_seed, run_id as u64, &format!("{key}/init"));
    let plan = if cfg.stratified {
        make_stratified_split(&data.class_indices(), cfg.train_fraction, split_seed)?
    } else {
        make_split(data.len(), cfg.train_fraction, split_seed)?
    };
    let train = data.subset(&plan.train_indices);
    let test = data.subset(&plan.test_indices);

    let mut net = Mlp::init_weights(&entry.architecture, init_seed, cfg.init_half_width, cfg.sigma)?;
    let outcome = train_network(&mut net, &train, entry.optimizer, cfg)?;
    Ok(RunReport {
        run_id,
        architecture: entry.architecture.to_string(),
        optimizer: entry.optimizer,
        split_seed,
        init_seed,
        training: evaluate(&net, &train, cfg.eval)?,
        testing: evaluate(&net, &test, cfg.eval)?,
        epochs_used: outcome.epochs_used,
        stop_reason: outcome.stop_reason,
        final_training_mse: outcome.final_mse,
    })
}

/// Arithmetic means over `runs`.
pub fn aggregate(entry: &SweepEntry, runs: &[RunReport]) -> Result<AggregateReport> {
    if runs.is_empty() {
        return Err(Error::Empty("run reports"));
    }
    Ok(AggregateReport {
        architecture: entry.architecture.to_string(),
        optimizer: entry.optimizer,
        run_count: runs.len(),
        training: MetricMeans::of(runs.iter().map(|r| &r.training)),
        testing: MetricMeans::of(runs.iter().map(|r| &r.testing)),
        mean_epochs: runs.iter().map(|r| r.epochs_used as f64).sum::<f64>() / runs.len() as f64,
    })
}

/// `cfg.repeats` sequential runs followed by aggregation.
pub fn run_protocol(
    data: &PreprocessedDataset,
    entry: &SweepEntry,
    cfg: &ProtocolConfig,
    master_seed: u64,
) -> Result<(Vec<RunReport>, AggregateReport)> {
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter {
            name: "repeats",
            reason: String::from("must be at least 1"),
        });
    }
    let runs = (0..cfg.repeats)
        .map(|r| run_single(data, entry, cfg, master_seed, r))
        .collect::<Result<Vec<_>>>()?;
    let agg = aggregate(entry, &runs)?;
    Ok((runs, agg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub architecture: String,
    pub optimizer: OptimizerKind,
    pub training: MetricMeans,
    pub testing: MetricMeans,
    pub run_count: usize,
    pub mean_epochs: f64,
    pub runs: Vec<RunReport>,
}

impl SweepRow {
    pub fn from_runs(agg: AggregateReport, runs: Vec<RunReport>) -> Self {
        Self {
            architecture: agg.architecture,
            optimizer: agg.optimizer,
            training: agg.training,
            testing: agg.testing,
            run_count: agg.run_count,
            mean_epochs: agg.mean_epochs,
            runs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub master_seed: u64,
    pub config: ProtocolConfig,
    pub suite: Vec<SweepRow>,
}

/// Runs the protocol for every entry, sequentially and in suite order.
pub fn sweep(
    data: &PreprocessedDataset,
    suite: &[SweepEntry],
    cfg: &ProtocolConfig,
    master_seed: u64,
) -> Result<SweepReport> {
    if suite.is_empty() {
        return Err(Error::Empty("sweep suite"));
    }
    let rows = suite
        .iter()
        .map(|e| run_protocol(data, e, cfg, master_seed).map(|(runs, agg)| SweepRow::from_runs(agg, runs)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        master_seed,
        config: *cfg,
        suite: rows,
    })
}
