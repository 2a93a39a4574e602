use std::fs;

use originnet::error::Error;
use originnet::io::{load_csv, load_model, load_preprocessed, provenance_path, save_model, write_csv, write_preprocessed};
use originnet_core::ingest::{generate_synthetic, SyntheticLayout};
use originnet_core::network::{Architecture, Mlp};
use originnet_core::preprocess::{preprocess_pipeline, PreprocessConfig};

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("raw.csv");
    let m = generate_synthetic(42, &SyntheticLayout::default()).unwrap();
    write_csv(&path, &m).unwrap();
    assert_eq!(load_csv(&path).unwrap(), m);
}

#[test]
fn preprocessed_round_trip_keeps_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pre.csv");
    let raw = generate_synthetic(1, &SyntheticLayout::default()).unwrap();
    let ds = preprocess_pipeline(&raw, &PreprocessConfig::default()).unwrap();
    write_preprocessed(&path, &ds).unwrap();
    assert!(provenance_path(&path).exists());
    let back = load_preprocessed(&path).unwrap();
    assert_eq!(back.features, ds.features);
    assert_eq!(back.provenance, ds.provenance);
    assert_eq!(back.vocabulary, ds.vocabulary);
}

fn load_text(text: &str) -> Result<originnet_core::ingest::RawMatrix, Error> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.csv");
    fs::write(&path, text).unwrap();
    load_csv(&path)
}

#[test]
fn ragged_row_names_the_row() {
    let err = load_text("origin,region,m1,m2\nJava,a,1,2\nBali,b,3\n").unwrap_err();
    assert!(matches!(err, Error::RaggedRow { row: 2, expected: 4, found: 3, .. }), "{err}");
}

#[test]
fn unparsable_value_names_row_and_column() {
    let err = load_text("origin,region,m1,m2\nJava,a,1,abc\n").unwrap_err();
    match err {
        Error::Parse { row, column, value, .. } => {
            assert_eq!((row, column.as_str(), value.as_str()), (1, "m2", "abc"));
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn negative_concentration_is_rejected() {
    let err = load_text("origin,region,m1,m2\nJava,a,1,-2\n").unwrap_err();
    assert!(matches!(err, Error::Core(originnet_core::Error::NegativeConcentration { row: 0, col: 1, .. })), "{err}");
}

#[test]
fn bad_header_and_empty_file_are_rejected() {
    assert!(matches!(load_text("a,b,c\n1,2,3\n").unwrap_err(), Error::Header { .. }));
    assert!(load_text("origin,region,m1\n").is_err());
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_csv(std::path::Path::new("/nonexistent/raw.csv")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn model_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let arch: Architecture = "5-4-3-2".parse().unwrap();
    let net = Mlp::init_weights(&arch, 9, 0.5, 1.5).unwrap();
    let vocab = vec!["x".to_owned(), "y".to_owned()];
    save_model(&path, &net, &vocab).unwrap();
    let (back, v) = load_model(&path).unwrap();
    assert_eq!(back, net);
    assert_eq!(v, vocab);
}

#[test]
fn unknown_model_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let arch: Architecture = "2-1".parse().unwrap();
    save_model(&path, &Mlp::init_weights(&arch, 0, 0.5, 1.0).unwrap(), &[]).unwrap();
    let text = fs::read_to_string(&path).unwrap().replace("\"format_version\": 1", "\"format_version\": 99");
    fs::write(&path, text).unwrap();
    assert!(matches!(load_model(&path).unwrap_err(), Error::FormatVersion(99)));
}
