//! The `bench` binary and on-disk formats, exercised through real files.

use std::fs;
use std::process::{Command, Output};

use tensorkit::bench::{parse_json_report, Method, CSV_HEADER, TIMING_NOTE};
use tensorkit::io::{self, RegressionDataset};
use tensorkit::regression::{kruskal_ridge_fit, RegressionOptions, Weight};
use tensorkit::{DenseTensor, KruskalTensor, TensorError, TuckerTensor};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench")).args(args).output().unwrap()
}

const SMALL: &[&str] = &["--shape", "6,5,4", "--iters", "4", "--repeats", "3", "--seed", "1"];

#[test]
fn csv_to_stdout() {
    let out = bench(&[&["--method", "cp", "--rank", "2"], SMALL].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_HEADER);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..5], &["cp", "6x5x4", "2", "4", "3"]);
    assert_eq!(fields[7].split(';').count(), 3);
}

#[test]
fn every_method_runs() {
    for (method, rank) in [("cp", "2"), ("tucker", "2,2,2"), ("nncp", "2"), ("nntucker", "2,1,2"), ("rpca", "1")] {
        let out = bench(&[&["--method", method, "--rank", rank], SMALL].concat());
        assert!(out.status.success(), "{method}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn json_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bench(&[&["--method", "tucker", "--rank", "2,3,2", "--format", "json", "--out", path.to_str().unwrap()], SMALL].concat());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["timing"], TIMING_NOTE);
    let records = parse_json_report(&text).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].method, Method::Tucker);
    assert_eq!(records[0].rank, vec![2, 3, 2]);
    assert_eq!(records[0].samples.len(), 3);
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bench.json");
    fs::write(&config, r#"{"method": "nncp", "shape": [5, 4, 3], "rank": 2, "iters": 3, "repeats": 2, "init": "svd"}"#).unwrap();
    let out = bench(&["--config", config.to_str().unwrap(), "--repeats", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..5], &["nncp", "5x4x3", "2", "3", "4"]);

    fs::write(&config, r#"{"method": "cp", "colour": 1}"#).unwrap();
    assert!(!bench(&["--config", config.to_str().unwrap()]).status.success());
}

#[test]
fn bad_arguments_fail() {
    assert_eq!(bench(&["--method", "pca"]).status.code(), Some(2));
    for args in [
        &["--method", "tucker", "--rank", "2,2", "--shape", "4,4,4"][..],
        &["--method", "cp", "--rank", "0", "--shape", "4,4,4"],
        &["--method", "cp", "--shape", "4,0,4"],
    ] {
        let out = bench(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("bench: "));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_bench")).args(SMALL).env("TK_THREADS", "zero").output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn thread_cap_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_bench"))
        .args([&["--method", "cp", "--rank", "2"], SMALL].concat())
        .env("TK_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn tnsr_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.tnsr");
    let x = DenseTensor::random_gaussian(&[3, 2, 2], 5).unwrap();
    io::save_tensor(&x, &path).unwrap();
    assert_eq!(io::load_tensor(&path).unwrap(), x);

    let bytes = fs::read(&path).unwrap();
    let write = |b: &[u8]| fs::write(&path, b).unwrap();

    write(&bytes[..bytes.len() - 3]);
    assert!(matches!(io::load_tensor(&path), Err(TensorError::Corrupt(_))));
    write(&[&bytes[..], &[0u8]].concat());
    assert!(matches!(io::load_tensor(&path), Err(TensorError::Corrupt(_))));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    write(&bad);
    assert!(matches!(io::load_tensor(&path), Err(TensorError::Format(_))));
    assert!(matches!(io::load_tensor(dir.path().join("missing.tnsr")), Err(TensorError::Io(_))));
}

#[test]
fn factorized_models_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let k = KruskalTensor::random(&[4, 3, 5], 2, 1).unwrap();
    io::save_kruskal(&k, dir.path().join("cp")).unwrap();
    assert_eq!(io::load_kruskal(dir.path().join("cp")).unwrap(), k);
    assert!(dir.path().join("cp").join(io::MANIFEST).exists());

    let t = TuckerTensor::random(&[4, 3, 5], &[2, 2, 3], 2).unwrap();
    io::save_tucker(&t, dir.path().join("tucker")).unwrap();
    assert_eq!(io::load_tucker(dir.path().join("tucker")).unwrap(), t);
    assert!(matches!(io::load_factorized(dir.path().join("tucker")).unwrap(), Weight::Tucker(_)));
    assert!(io::load_kruskal(dir.path().join("tucker")).is_err());

    fs::remove_file(dir.path().join("cp").join("factor_1.tnsr")).unwrap();
    assert!(io::load_kruskal(dir.path().join("cp")).is_err());
}

#[test]
fn regression_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let truth = KruskalTensor::random(&[3, 4], 1, 9).unwrap().to_tensor().unwrap();
    let covariates: Vec<DenseTensor> = (0..60).map(|i| DenseTensor::random_gaussian(&[3, 4], 100 + i).unwrap()).collect();
    let responses: Vec<f64> = covariates.iter().map(|x| x.inner(&truth).unwrap() + 0.5).collect();
    let data = RegressionDataset { covariates, responses };
    let (y_path, x_dir) = (dir.path().join("y.txt"), dir.path().join("x"));
    io::save_regression_dataset(&data, &y_path, &x_dir).unwrap();

    let loaded = io::load_regression_dataset(&y_path, &x_dir).unwrap();
    assert_eq!(loaded, data);
    let model = kruskal_ridge_fit(&loaded.covariates, &loaded.responses, 1, 0.0, &RegressionOptions::default()).unwrap();
    assert!((model.bias - 0.5).abs() < 1e-8);

    fs::write(&y_path, "1.0\n\nnope\n").unwrap();
    let err = io::read_responses(&y_path).unwrap_err();
    assert!(matches!(err, TensorError::Format(ref m) if m.contains(":3:")), "{err}");
    fs::write(&y_path, "1.0\n2.0\n").unwrap();
    assert!(matches!(io::load_regression_dataset(&y_path, &x_dir), Err(TensorError::ShapeMismatch(_))));
}
