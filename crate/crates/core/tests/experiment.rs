use originnet_core::backprop::StopReason;
use originnet_core::experiment::{
    aggregate, default_suite, run_protocol, run_single, sweep, OptimizerKind, ProtocolConfig, SweepEntry,
};
use originnet_core::ingest::{generate_synthetic, SyntheticLayout};
use originnet_core::preprocess::{preprocess_pipeline, PreprocessConfig, PreprocessedDataset};

fn dataset() -> PreprocessedDataset {
    let raw = generate_synthetic(42, &SyntheticLayout::default()).unwrap();
    preprocess_pipeline(&raw, &PreprocessConfig::default()).unwrap()
}

fn quick_cfg(repeats: usize) -> ProtocolConfig {
    let mut cfg = ProtocolConfig {
        repeats,
        ..Default::default()
    };
    cfg.backprop.max_epochs = 200;
    cfg.rprop.max_epochs = 200;
    cfg
}

fn entry(arch: &str, opt: OptimizerKind) -> SweepEntry {
    SweepEntry::new(arch.parse().unwrap(), opt)
}

#[test]
fn single_repeat_aggregate_equals_the_run() {
    let ds = dataset();
    let e = entry("47-5-7-4", OptimizerKind::Rprop);
    let (runs, agg) = run_protocol(&ds, &e, &quick_cfg(1), 3).unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(agg.run_count, 1);
    assert_eq!(agg.training.accuracy, runs[0].training.accuracy_percent);
    assert_eq!(agg.testing.mse, runs[0].testing.mse);
    assert_eq!(agg.testing.r2, runs[0].testing.r2);
}

#[test]
fn aggregates_are_arithmetic_means() {
    let ds = dataset();
    let e = entry("47-3-5-4", OptimizerKind::Backprop);
    let (runs, agg) = run_protocol(&ds, &e, &quick_cfg(5), 11).unwrap();
    let n = runs.len() as f64;
    let mean = |f: &dyn Fn(&originnet_core::RunReport) -> f64| runs.iter().map(f).sum::<f64>() / n;
    assert!((agg.training.mse - mean(&|r| r.training.mse)).abs() <= 1e-12);
    assert!((agg.testing.accuracy - mean(&|r| r.testing.accuracy_percent)).abs() <= 1e-12);
    assert!((agg.testing.r2 - mean(&|r| r.testing.r2)).abs() <= 1e-12);
    assert_eq!(agg, aggregate(&e, &runs).unwrap());
}

#[test]
fn runs_are_pure_functions_of_their_identity() {
    let ds = dataset();
    let cfg = quick_cfg(3);
    let e = entry("47-15-4", OptimizerKind::Rprop);
    let (runs, _) = run_protocol(&ds, &e, &cfg, 9).unwrap();
    assert_eq!(runs[2], run_single(&ds, &e, &cfg, 9, 2).unwrap());
    assert_ne!(runs[0].split_seed, runs[1].split_seed);
    for r in &runs {
        assert!(r.epochs_used <= cfg.rprop.max_epochs);
        if r.stop_reason == StopReason::TargetReached {
            assert!(r.final_training_mse <= cfg.rprop.error_target);
        }
        assert_eq!(r.training.n_total, 75);
        assert_eq!(r.testing.n_total, 19);
    }
}

#[test]
fn sweep_is_independent_of_suite_order() {
    let ds = dataset();
    let cfg = quick_cfg(2);
    let a = entry("47-3-5-4", OptimizerKind::Rprop);
    let b = entry("47-4-6-4", OptimizerKind::Backprop);
    let forward = sweep(&ds, &[a.clone(), b.clone()], &cfg, 5).unwrap();
    let reverse = sweep(&ds, &[b, a], &cfg, 5).unwrap();
    assert_eq!(forward.suite[0], reverse.suite[1]);
    assert_eq!(forward.suite[1], reverse.suite[0]);
}

#[test]
fn sweep_of_one_entry() {
    let ds = dataset();
    let report = sweep(&ds, &[entry("47-6-8-4", OptimizerKind::Rprop)], &quick_cfg(1), 1).unwrap();
    assert_eq!(report.suite.len(), 1);
    assert!(sweep(&ds, &[], &quick_cfg(1), 1).is_err());
}

#[test]
fn mismatched_architecture_is_rejected() {
    let ds = dataset();
    let e = entry("40-15-4", OptimizerKind::Rprop);
    assert!(run_single(&ds, &e, &quick_cfg(1), 0, 0).is_err());
    let e = entry("47-15-3", OptimizerKind::Rprop);
    assert!(run_single(&ds, &e, &quick_cfg(1), 0, 0).is_err());
}

#[test]
fn default_suite_covers_all_result_rows() {
    let suite = default_suite();
    assert_eq!(suite.len(), 10);
    let keys: Vec<String> = suite.iter().map(SweepEntry::key).collect();
    for arch in ["47-3-5-4", "47-4-6-4", "47-5-7-4", "47-6-8-4", "47-15-4"] {
        for opt in ["backprop", "rprop"] {
            assert!(keys.contains(&format!("{arch}/{opt}")));
        }
    }
}

#[test]
fn stratified_protocol_runs() {
    let ds = dataset();
    let mut cfg = quick_cfg(2);
    cfg.stratified = true;
    let (runs, _) = run_protocol(&ds, &entry("47-5-7-4", OptimizerKind::Rprop), &cfg, 2).unwrap();
    assert!(runs.iter().all(|r| r.training.n_total == 75));
}
