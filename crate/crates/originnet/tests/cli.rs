use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_originnet")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_94_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("raw.csv");
    let o = run(&["generate", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 49);
    assert_eq!(lines.count(), 94);
}

#[test]
fn train_is_deterministic_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    assert!(run(&["generate", "--out", s(&p("raw.csv"))]).status.success());
    for name in ["a.json", "b.json"] {
        let o = run(&["train", "--data", s(&p("raw.csv")), "--out", s(&p(name)), "--optimizer", "rprop", "--arch", "47-5-7-4"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(p("a.json")).unwrap(), std::fs::read(p("b.json")).unwrap());
    assert!(p("a.history.json").exists());

    let o = run(&["evaluate", "--model", s(&p("a.json")), "--data", s(&p("raw.csv"))]);
    assert!(o.status.success());
    let result: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(result["n_total"], 94);
    for key in ["accuracy_percent", "mse", "r2", "n_correct"] {
        assert!(result.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn preprocess_then_sweep_from_preprocessed_data() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    assert!(run(&["generate", "--out", s(&p("raw.csv"))]).status.success());
    assert!(run(&["preprocess", "--data", s(&p("raw.csv")), "--out", s(&p("pre.csv"))]).status.success());
    assert!(p("pre.provenance.json").exists());
    let o = run(&[
        "sweep", "--data", s(&p("pre.csv")), "--preprocessed", "--repeats", "2", "--optimizer", "rprop",
        "--out", s(&p("report.json")), "--csv", s(&p("table.csv")),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(p("table.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(p("report.json")).unwrap()).unwrap();
    assert_eq!(report["suite"].as_array().unwrap().len(), 5);
}

#[test]
fn help_lists_defaults() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for needle in ["sweep", "--eta-plus", "[default: 1.2]", "[default: 42]", "ORIGINNET_LOG"] {
        assert!(text.contains(needle), "help lacks {needle}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["train"]).status.code(), Some(2));
    assert_eq!(run(&["train", "--data", "x.csv", "--out", "m.json", "--arch", "47-x-4"]).status.code(), Some(2));
}

#[test]
fn missing_input_exits_3() {
    let o = run(&["preprocess", "--data", "/nonexistent/raw.csv", "--out", "/tmp/never.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/raw.csv"));
}

#[test]
fn malformed_input_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "origin,region,m1\nJava,a,nope\n").unwrap();
    let o = run(&["preprocess", "--data", s(&bad), "--out", s(&dir.path().join("o.csv"))]);
    assert_eq!(o.status.code(), Some(4));
}
