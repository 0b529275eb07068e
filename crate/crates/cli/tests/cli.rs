//! Behavior tests for the `granulate` binary: argument validation, config
//! layering, output shapes, and failure modes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_granulate"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(!out.status.success(), "command {args:?} unexpectedly passed");
    out
}

fn line_count(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for out in [&a, &b] {
        run_ok(&[
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
            "synth",
            "--preset",
            "dam5",
            "--n",
            "50",
        ]);
    }
    run_ok(&[
        "--seed",
        "43",
        "--out",
        c.to_str().unwrap(),
        "synth",
        "--preset",
        "dam5",
        "--n",
        "50",
    ]);
    let bytes_a = fs::read(a.join("dam5.csv")).unwrap();
    let bytes_b = fs::read(b.join("dam5.csv")).unwrap();
    let bytes_c = fs::read(c.join("dam5.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must give identical bytes");
    assert_ne!(bytes_a, bytes_c, "different seeds should differ");
    assert_eq!(line_count(&a.join("dam5.csv")), 51);
}

#[test]
fn synth_rejects_bad_requests() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let e = run_err(&[
        "--out",
        out.to_str().unwrap(),
        "synth",
        "--preset",
        "dam5",
        "--n",
        "0",
    ]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("n = 0"));
    let e = run_err(&[
        "--out",
        out.to_str().unwrap(),
        "synth",
        "--preset",
        "granite",
        "--n",
        "5",
    ]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("preset"));
}

#[test]
fn split_produces_requested_sizes_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let synth = dir.path().join("synth");
    let split = dir.path().join("split");
    run_ok(&[
        "--seed",
        "1",
        "--out",
        synth.to_str().unwrap(),
        "synth",
        "--preset",
        "dam5",
        "--n",
        "100",
    ]);
    let input = synth.join("dam5.csv");
    run_ok(&[
        "--seed",
        "2",
        "--out",
        split.to_str().unwrap(),
        "split",
        "--input",
        input.to_str().unwrap(),
        "--train",
        "60",
        "--test",
        "30",
    ]);
    assert_eq!(line_count(&split.join("train.csv")), 61);
    assert_eq!(line_count(&split.join("test.csv")), 31);
    let manifest = fs::read_to_string(split.join("manifest.txt")).unwrap();
    assert!(manifest.contains("command = split"));
    assert!(manifest.contains("seed = 2"));
    assert!(manifest.contains("input "));
    assert!(manifest.contains("output train.csv = sha256:"));
    assert!(manifest.contains("output test.csv = sha256:"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let synth = dir.path().join("synth");
    run_ok(&[
        "--seed",
        "3",
        "--out",
        synth.to_str().unwrap(),
        "synth",
        "--preset",
        "xyz",
        "--n",
        "80",
    ]);
    let input = synth.join("xyz.csv");
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# run settings\nlevels = 4\n").unwrap();

    let from_cfg = dir.path().join("rst_cfg");
    run_ok(&[
        "--seed",
        "3",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        from_cfg.to_str().unwrap(),
        "rst-rules",
        "--input",
        input.to_str().unwrap(),
    ]);
    let report = fs::read_to_string(from_cfg.join("report.txt")).unwrap();
    assert!(report.contains("levels = 4"), "config key applies:\n{report}");

    let from_flag = dir.path().join("rst_flag");
    run_ok(&[
        "--seed",
        "3",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        from_flag.to_str().unwrap(),
        "rst-rules",
        "--input",
        input.to_str().unwrap(),
        "--levels",
        "2",
    ]);
    let report = fs::read_to_string(from_flag.join("report.txt")).unwrap();
    assert!(report.contains("levels = 2"), "flag wins:\n{report}");
    let manifest = fs::read_to_string(from_flag.join("manifest.txt")).unwrap();
    assert!(manifest.contains("config = sha256:"));
}

#[test]
fn missing_input_fails_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let e = run_err(&[
        "--out",
        out.to_str().unwrap(),
        "split",
        "--input",
        "/no/such/table.csv",
        "--train",
        "1",
        "--test",
        "1",
    ]);
    let stderr = String::from_utf8_lossy(&e.stderr);
    assert!(stderr.contains("/no/such/table.csv"), "stderr: {stderr}");
}

#[test]
fn predict_grid_validates_its_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let e = run_err(&["--out", out.to_str().unwrap(), "predict-grid"]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("--axis"));
    let e = run_err(&[
        "--out",
        out.to_str().unwrap(),
        "predict-grid",
        "--axis",
        "x:0:1:0.5",
    ]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("--tsk or --rules"));
    let e = run_err(&[
        "--out",
        out.to_str().unwrap(),
        "predict-grid",
        "--tsk",
        "m.txt",
        "--rules",
        "r.txt",
        "--axis",
        "x:0:1:0.5",
    ]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("not both"));
    let e = run_err(&[
        "--out",
        out.to_str().unwrap(),
        "predict-grid",
        "--tsk",
        "m.txt",
        "--axis",
        "a:0:1:1",
        "--axis",
        "b:0:1:1",
        "--axis",
        "c:0:1:1",
        "--axis",
        "d:0:1:1",
    ]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("at most 3"));
    let e = run_err(&[
        "--out",
        out.to_str().unwrap(),
        "predict-grid",
        "--tsk",
        "m.txt",
        "--axis",
        "x:zero:1:0.5",
    ]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("bad number"));
}

#[test]
fn model_sweep_and_curvature_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let synth = dir.path().join("synth");
    run_ok(&[
        "--seed",
        "9",
        "--out",
        synth.to_str().unwrap(),
        "synth",
        "--preset",
        "xyz",
        "--n",
        "80",
    ]);
    let nfis = dir.path().join("nfis");
    run_ok(&[
        "--seed",
        "9",
        "--out",
        nfis.to_str().unwrap(),
        "nfis-train",
        "--input",
        synth.join("xyz.csv").to_str().unwrap(),
        "--rules",
        "2",
        "--epochs",
        "5",
    ]);
    let grid = dir.path().join("grid");
    run_ok(&[
        "--out",
        grid.to_str().unwrap(),
        "predict-grid",
        "--tsk",
        nfis.join("tsk.txt").to_str().unwrap(),
        "--axis",
        "X:0:400:100",
        "--axis",
        "Y:0:400:100",
        "--axis",
        "Z:60:60:1",
    ]);
    // 5 x 5 x 1 nodes + header + three axis comments.
    assert_eq!(line_count(&grid.join("grid.tsv")), 25 + 1 + 3);
    let div = dir.path().join("div");
    run_ok(&[
        "--out",
        div.to_str().unwrap(),
        "divergence",
        "--input",
        grid.join("grid.tsv").to_str().unwrap(),
    ]);
    assert_eq!(line_count(&div.join("divergence.tsv")), 25 + 1 + 3);
}

#[test]
fn help_screens_exist_for_every_command() {
    for args in [
        vec!["--help"],
        vec!["synth", "--help"],
        vec!["split", "--help"],
        vec!["som-train", "--help"],
        vec!["nfis-train", "--help"],
        vec!["rst-rules", "--help"],
        vec!["sonfis", "--help"],
        vec!["sorst", "--help"],
        vec!["predict-grid", "--help"],
        vec!["divergence", "--help"],
    ] {
        let out = bin().args(&args).output().expect("binary runs");
        assert!(out.status.success(), "help failed for {args:?}");
    }
}
