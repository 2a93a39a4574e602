//! `originnet` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use originnet_core::backprop::{BackpropConfig, GradientMode};
use originnet_core::experiment::{default_suite, train_network, OptimizerKind, ProtocolConfig, SweepEntry};
use originnet_core::ingest::{generate_synthetic, SyntheticLayout};
use originnet_core::metrics::{evaluate, EvalOptions, MatchRule, R2Form};
use originnet_core::network::{Architecture, Mlp};
use originnet_core::preprocess::{preprocess_pipeline, NormAxis, PreprocessConfig, PreprocessedDataset};
use originnet_core::rprop::RpropConfig;

use crate::error::{Error, Result};
use crate::{io, report, runner};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_COMPUTE: i32 = 5;

const AFTER_HELP: &str = "\
Exit status:
  0  success
  1  unexpected failure
  2  usage error (unknown subcommand, invalid or missing flag)
  3  I/O error (missing or unwritable file)
  4  malformed input file (CSV header, ragged row, non-numeric field, JSON)
  5  invalid data or hyperparameters for the computation

Environment:
  ORIGINNET_LOG  log filter for stderr diagnostics (error, warn, info, debug, trace)";

#[derive(Debug, Parser)]
#[command(
    name = "originnet",
    version,
    about = "Train sigmoid MLPs with backprop or RPROP to classify origin from metabolite composition",
    after_help = AFTER_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write a deterministic synthetic 94 x 47 concentration CSV to --out
    Generate,
    /// Zero-replace, log10 and normalize --data; write CSV to --out plus a provenance sidecar
    Preprocess,
    /// Train one network on every row of --data; write model JSON to --out and the epoch history
    Train,
    /// Evaluate --model on --data; write the result JSON to --out (or stdout)
    Evaluate,
    /// Run the repeated-split protocol for every architecture/optimizer entry
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Backprop,
    Rprop,
}

impl From<OptimizerArg> for OptimizerKind {
    fn from(o: OptimizerArg) -> Self {
        match o {
            OptimizerArg::Backprop => OptimizerKind::Backprop,
            OptimizerArg::Rprop => OptimizerKind::Rprop,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatchRuleArg {
    Exact,
    Argmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum R2Arg {
    Printed,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Row,
    Column,
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Input CSV (`origin,region,m1,...,mN`)
    #[arg(long, global = true, value_name = "PATH")]
    pub data: Option<PathBuf>,

    /// Output file [sweep default: sweep-report.json]
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Model JSON to evaluate
    #[arg(long, global = true, value_name = "PATH")]
    pub model: Option<PathBuf>,

    /// Epoch history JSON [train default: <out>.history.json]
    #[arg(long, global = true, value_name = "PATH")]
    pub history: Option<PathBuf>,

    /// Also write the sweep table as CSV
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,

    /// Treat --data as already preprocessed features
    #[arg(long, global = true)]
    pub preprocessed: bool,

    /// Generator seed, training init seed, or sweep master seed
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Random splits per sweep entry
    #[arg(long, global = true, default_value_t = 30)]
    pub repeats: usize,

    /// Layer sizes such as 47-15-4 [train default: 47-15-4; sweep default: full suite]
    #[arg(long, global = true, value_parser = parse_architecture)]
    pub arch: Option<Architecture>,

    /// Optimizer [train default: backprop; sweep default: both]
    #[arg(long, global = true, value_enum)]
    pub optimizer: Option<OptimizerArg>,

    /// Backprop learning rate
    #[arg(long, global = true, default_value = "0.9")]
    pub lr: f64,

    /// Backprop momentum
    #[arg(long, global = true, default_value = "0.1")]
    pub momentum: f64,

    /// Backprop: update per sample instead of per epoch
    #[arg(long, global = true)]
    pub online: bool,

    /// Maximum training epochs
    #[arg(long, global = true, default_value_t = 5000)]
    pub epochs: usize,

    /// Stop once the training MSE is at or below this value
    #[arg(long, global = true, default_value = "1e-3")]
    pub target: f64,

    /// RPROP increase factor
    #[arg(long, global = true, default_value = "1.2")]
    pub eta_plus: f64,

    /// RPROP decrease factor
    #[arg(long, global = true, default_value = "0.5")]
    pub eta_minus: f64,

    /// RPROP upper update-value limit
    #[arg(long, global = true, default_value = "50")]
    pub delta_max: f64,

    /// RPROP lower update-value limit
    #[arg(long, global = true, default_value = "1e-6")]
    pub delta_min: f64,

    /// RPROP initial update value
    #[arg(long, global = true, default_value = "0.1")]
    pub delta_init: f64,

    /// Sigmoid slope
    #[arg(long, global = true, default_value = "1.0")]
    pub sigma: f64,

    /// Half-width of the uniform weight initialization
    #[arg(long, global = true, default_value = "0.5")]
    pub init_range: f64,

    /// Training share of each split
    #[arg(long, global = true, default_value = "0.8")]
    pub train_fraction: f64,

    /// Stratify splits by origin
    #[arg(long, global = true)]
    pub stratified: bool,

    /// How outputs are scored for accuracy
    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub match_rule: MatchRuleArg,

    /// Coefficient-of-determination form
    #[arg(long, global = true, value_enum, default_value = "printed")]
    pub r2: R2Arg,

    /// Normalization axis
    #[arg(long, global = true, value_enum, default_value = "row")]
    pub normalize: AxisArg,

    /// Replacement for zero concentrations
    #[arg(long, global = true, default_value = "1e-5")]
    pub zero_floor: f64,

    /// Worker threads for sweep
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

/// Parses `47-15-4` style layer lists.
pub fn parse_architecture(s: &str) -> std::result::Result<Architecture, originnet_core::Error> {
    s.parse()
}

impl Options {
    fn preprocess_config(&self) -> PreprocessConfig {
        PreprocessConfig {
            zero_floor: self.zero_floor,
            axis: match self.normalize {
                AxisArg::Row => NormAxis::Row,
                AxisArg::Column => NormAxis::Column,
            },
        }
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            train_fraction: self.train_fraction,
            repeats: self.repeats,
            stratified: self.stratified,
            sigma: self.sigma,
            init_half_width: self.init_range,
            backprop: BackpropConfig {
                learning_rate: self.lr,
                momentum: self.momentum,
                max_epochs: self.epochs,
                error_target: self.target,
                mode: if self.online {
                    GradientMode::Online
                } else {
                    GradientMode::Batch
                },
            },
            rprop: RpropConfig {
                eta_plus: self.eta_plus,
                eta_minus: self.eta_minus,
                delta_max: self.delta_max,
                delta_min: self.delta_min,
                delta_init: self.delta_init,
                max_epochs: self.epochs,
                error_target: self.target,
            },
            eval: EvalOptions {
                match_rule: match self.match_rule {
                    MatchRuleArg::Exact => MatchRule::Exact,
                    MatchRuleArg::Argmax => MatchRule::Argmax,
                },
                r2_form: match self.r2 {
                    R2Arg::Printed => R2Form::Printed,
                    R2Arg::Standard => R2Form::Standard,
                },
            },
        }
    }

    fn require<'a>(&self, value: &'a Option<PathBuf>, flag: &str, cmd: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::Usage(format!("`{cmd}` requires {flag}")))
    }

    fn dataset(&self, cmd: &str) -> Result<PreprocessedDataset> {
        let path = self.require(&self.data, "--data", cmd)?;
        if self.preprocessed {
            io::load_preprocessed(path)
        } else {
            let raw = io::load_csv(path)?;
            Ok(preprocess_pipeline(&raw, &self.preprocess_config())?)
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            log::error!("{e}");
            eprintln!("originnet: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let o = &cli.opts;
    match cli.command {
        Command::Generate => generate(o),
        Command::Preprocess => preprocess(o),
        Command::Train => train(o),
        Command::Evaluate => evaluate_cmd(o),
        Command::Sweep => sweep(o),
    }
}

fn generate(o: &Options) -> Result<()> {
    let out = o.require(&o.out, "--out", "generate")?;
    let m = generate_synthetic(o.seed, &SyntheticLayout::default())?;
    io::write_csv(out, &m)?;
    println!(
        "wrote {} rows x {} metabolites to {}",
        m.n_samples(),
        m.n_metabolites(),
        out.display()
    );
    Ok(())
}

fn preprocess(o: &Options) -> Result<()> {
    let out = o.require(&o.out, "--out", "preprocess")?;
    let ds = o.dataset("preprocess")?;
    io::write_preprocessed(out, &ds)?;
    println!(
        "wrote {} x {} features to {} ({} zeros replaced, {} constant lines)",
        ds.len(),
        ds.n_features(),
        out.display(),
        ds.provenance.zeros_replaced,
        ds.provenance.constant_lines.len()
    );
    Ok(())
}

fn default_history_path(out: &Path) -> PathBuf {
    out.with_extension("history.json")
}

fn train(o: &Options) -> Result<()> {
    let out = o.require(&o.out, "--out", "train")?;
    let ds = o.dataset("train")?;
    let arch = match &o.arch {
        Some(a) => a.clone(),
        None => "47-15-4".parse()?,
    };
    let optimizer: OptimizerKind = o.optimizer.unwrap_or(OptimizerArg::Backprop).into();
    let cfg = o.protocol_config();
    let data = ds.labeled();

    let mut net = Mlp::init_weights(&arch, o.seed, cfg.init_half_width, cfg.sigma)?;
    let outcome = train_network(&mut net, &data, optimizer, &cfg)?;
    let result = evaluate(&net, &data, cfg.eval)?;

    io::save_model(out, &net, &ds.vocabulary)?;
    let history = o.history.clone().unwrap_or_else(|| default_history_path(out));
    io::write_history(&history, &outcome.history)?;
    println!(
        "{arch} {optimizer}: {:?} after {} epochs, mse {:.6}, accuracy {:.2}% ({}/{})",
        outcome.stop_reason,
        outcome.epochs_used,
        outcome.final_mse,
        result.accuracy_percent,
        result.n_correct,
        result.n_total
    );
    Ok(())
}

fn evaluate_cmd(o: &Options) -> Result<()> {
    let model = o.require(&o.model, "--model", "evaluate")?;
    let (net, vocabulary) = io::load_model(model)?;
    let ds = o.dataset("evaluate")?;
    if !vocabulary.is_empty() && vocabulary != ds.vocabulary {
        return Err(Error::Usage(format!(
            "model was trained on origins {vocabulary:?} but the data has {:?}",
            ds.vocabulary
        )));
    }
    let result = evaluate(&net, &ds.labeled(), o.protocol_config().eval)?;
    match &o.out {
        Some(out) => {
            io::write_json(out, &result)?;
            println!(
                "accuracy {:.2}% ({}/{}), mse {:.6}, r2 {:.4}",
                result.accuracy_percent, result.n_correct, result.n_total, result.mse, result.r2
            );
        }
        None => println!(
            "{}",
            serde_json::to_string_pretty(&result).expect("EvalResult serializes")
        ),
    }
    Ok(())
}

fn suite_for(o: &Options) -> Vec<SweepEntry> {
    let optimizers: Vec<OptimizerKind> = match o.optimizer {
        Some(opt) => vec![opt.into()],
        None => vec![OptimizerKind::Backprop, OptimizerKind::Rprop],
    };
    match &o.arch {
        Some(arch) => optimizers
            .into_iter()
            .map(|opt| SweepEntry::new(arch.clone(), opt))
            .collect(),
        None => default_suite()
            .into_iter()
            .filter(|e| optimizers.contains(&e.optimizer))
            .collect(),
    }
}

fn sweep(o: &Options) -> Result<()> {
    let ds = o.dataset("sweep")?;
    let out = o
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("sweep-report.json"));
    let suite = suite_for(o);
    let report = runner::run_sweep(&ds, &suite, &o.protocol_config(), o.seed, o.jobs)?;
    io::write_json(&out, &report)?;
    if let Some(csv) = &o.csv {
        report::write_table_csv(csv, &report)?;
    }
    print!("{}", report::render_table(&report));
    Ok(())
}
