//! Command-line behavior: exit codes, diagnostics, and stage-by-stage
//! runs from persisted artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adsb-pipeline"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn unknown_flag_exits_1_with_usage() {
    let out = bin().arg("--frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"), "{}", stderr(&out));
}

#[test]
fn unknown_subcommand_exits_1() {
    let out = bin().arg("transmogrify").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ingest"));
}

#[test]
fn missing_input_dir_exits_3_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "ingest",
            "--input",
            "no-such-dir",
            "--require-interesting",
            "--out",
            "d.trk",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    let msg = stderr(&out);
    assert!(msg.contains("ingest"), "{msg}");
    assert!(msg.contains("no-such-dir"), "{msg}");
}

#[test]
fn malformed_artifact_exits_2_naming_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.seq"), "not a sequence file\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "split",
            "--sequences",
            "bad.seq",
            "--out-train",
            "t.seq",
            "--out-val",
            "v.seq",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("split"), "{}", stderr(&out));
}

#[test]
fn stages_compose_on_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| {
        let out = run_in(d, args);
        assert!(
            out.status.success(),
            "{:?} failed: {}",
            args.first(),
            stderr(&out)
        );
        out
    };

    ok(&[
        "fixture", "--out", ".", "--aircraft", "4", "--hours", "2", "--seed", "9",
    ]);
    ok(&[
        "ingest", "--input", "snapshots", "--whitelist", "whitelist.txt",
        "--require-interesting", "--out", "dataset.trk",
    ]);
    ok(&[
        "preprocess", "--dataset", "dataset.trk", "--seed", "42", "--min-present", "4",
        "--out", "sequences.seq", "--scaler", "scaler.stats",
    ]);
    ok(&[
        "split", "--sequences", "sequences.seq", "--fraction", "0.8", "--seed", "42",
        "--out-train", "train.seq", "--out-val", "val.seq",
    ]);
    ok(&[
        "train", "--sequences", "train.seq", "--val", "val.seq", "--variant", "dense",
        "--lr", "1e-3", "--epochs", "5", "--batch", "32", "--seed", "42",
        "--out", "model.params", "--history", "history.csv",
    ]);
    ok(&[
        "extract", "--model", "model.params", "--sequences", "val.seq",
        "--scaler", "scaler.stats", "--method", "both", "--k", "10", "--out", "report",
    ]);
    ok(&[
        "report", "--model", "model.params", "--sequences", "val.seq", "--out", "report",
    ]);

    let history = std::fs::read_to_string(d.join("history.csv")).unwrap();
    assert!(history.starts_with("epoch,train_mse,val_mse"));
    assert_eq!(history.lines().count(), 1 + 5);
    let selected = std::fs::read_to_string(d.join("report/selected.txt")).unwrap();
    assert_eq!(selected.lines().count(), 10);
    let scores = std::fs::read_to_string(d.join("report/scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 1 + 17 * 2, "both methods scored");
    assert!(d.join("report/comparison.txt").exists());
    assert!(d.join("report/report.txt").exists());
    for stage in ["ingest", "preprocess", "split", "train"] {
        assert!(d.join(format!("{stage}.manifest.json")).exists());
    }
}

#[test]
fn lstm_variant_trains_and_reports_from_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| {
        let out = run_in(d, args);
        assert!(out.status.success(), "{}", stderr(&out));
    };
    ok(&[
        "fixture", "--out", ".", "--aircraft", "3", "--hours", "1", "--seed", "4",
    ]);
    ok(&[
        "ingest", "--input", "snapshots", "--require-interesting", "--out", "dataset.trk",
    ]);
    ok(&[
        "preprocess", "--dataset", "dataset.trk", "--min-present", "3",
        "--out", "sequences.seq", "--scaler", "scaler.stats",
    ]);
    ok(&[
        "train", "--sequences", "sequences.seq", "--variant", "lstm", "--hidden-dim", "8",
        "--epochs", "2", "--out", "model.params", "--history", "history.csv",
    ]);
    // weight-norm alone cannot apply to an lstm model.
    let out = run_in(
        d,
        &[
            "extract", "--model", "model.params", "--sequences", "sequences.seq",
            "--scaler", "scaler.stats", "--method", "weight-norm", "--out", "report",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    // `both` falls back to the ablation probe.
    ok(&[
        "extract", "--model", "model.params", "--sequences", "sequences.seq",
        "--scaler", "scaler.stats", "--method", "both", "--k", "6", "--out", "report",
    ]);
    let scores = std::fs::read_to_string(d.join("report/scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 1 + 17);
    assert!(scores.contains(",ablation,"));
}
