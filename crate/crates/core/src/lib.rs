//! Feedforward network toolkit for classifying sample origin from metabolite
//! composition.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the whole numerical
//! pipeline:
//!
//! - [`ingest`]: labeled concentration matrices, one-hot origin codes and a
//!   deterministic synthetic data generator.
//! - [`preprocess`]: zero replacement, `log10` transform and per-experiment
//!   z-score normalization.
//! - [`network`]: sigmoid multilayer perceptron with bias neurons.
//! - [`backprop`]: chain-rule gradients of the batch MSE and gradient descent
//!   with momentum.
//! - [`rprop`]: resilient propagation with backtracking and step clamping.
//! - [`metrics`]: accuracy, MSE and coefficient of determination.
//! - [`experiment`]: repeated random train/test splits, run aggregation and the
//!   architecture sweep.
//!
//! File formats, the CLI and thread-level parallelism live in the `originnet`
//! crate.
#![cfg_attr(not(test), no_std)]
#![deny(rust_2018_idioms)]

extern crate alloc;

pub mod backprop;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod matrix;
pub mod metrics;
pub mod network;
pub mod preprocess;
pub mod rng;
pub mod rprop;

pub use backprop::{BackpropConfig, EpochRecord, Gradient, GradientMode, MomentumState, StopReason};
pub use error::{Error, Result};
pub use experiment::{AggregateReport, OptimizerKind, ProtocolConfig, RunReport, SplitPlan};
pub use ingest::{OriginCode, RawMatrix, SyntheticLayout};
pub use matrix::Matrix;
pub use metrics::EvalResult;
pub use network::{Architecture, ForwardTrace, Mlp};
pub use preprocess::{LabeledSet, PreprocessedDataset};
pub use rprop::{RpropConfig, RpropState};
