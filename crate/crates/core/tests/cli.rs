use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use active_cc::harness::output::{read_jsonl, SUMMARY_HEADER};

const SMALL: &str = r#"
strategy = "unient"
switch_iter = 3
batch_size = 10
budget = 120
repetitions = 2

[dataset]
kind = "synthetic"
n = 20
k = 3
dim = 4
"#;

fn active_cc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_active-cc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    dir
}

#[test]
fn run_writes_logs_and_summary() {
    let dir = setup();
    let out = active_cc(&["run", "--config", "small.toml", "--output-dir", "out"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let base = dir.path().join("out/unient");
    for seed in [0, 1] {
        let recs = read_jsonl(&base.join(format!("seed-{seed}.jsonl"))).unwrap();
        assert_eq!(recs.last().unwrap().queries, 120);
    }
    let summary = fs::read_to_string(base.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some(SUMMARY_HEADER));
    assert_eq!(summary.lines().count(), 1 + 13);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = setup();
    let out = active_cc(
        &["run", "--config", "small.toml", "--seed", "9", "--output-dir", "o"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(dir.path().join("o/unient/seed-9.jsonl").exists());
    assert!(dir.path().join("o/unient/seed-10.jsonl").exists());
}

#[test]
fn sweep_writes_grid_tables() {
    let dir = setup();
    let out = active_cc(
        &[
            "sweep",
            "--config",
            "small.toml",
            "--strategies",
            "coverage-freq-hard,uniform",
            "--seeds",
            "2",
            "--output-dir",
            "g",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let seeds = fs::read_to_string(dir.path().join("g/seeds.csv")).unwrap();
    assert_eq!(seeds.lines().count(), 1 + 4);
    assert!(dir.path().join("g/coverage-freq-hard/summary.csv").exists());
    assert!(dir.path().join("g/uniform/seed-1.jsonl").exists());
}

#[test]
fn ablate_switch_point() {
    let dir = setup();
    let out = active_cc(
        &[
            "ablate",
            "switch-point",
            "--config",
            "small.toml",
            "--seeds",
            "1",
            "--output-dir",
            "a",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("a/switch-point/seeds.csv").exists());
}

#[test]
fn config_problems_exit_with_one() {
    let dir = setup();
    fs::write(dir.path().join("bad.toml"), "batch_size = 0\n").unwrap();
    for args in [
        &["run", "--config", "bad.toml"][..],
        &["run", "--config", "missing.toml"],
        &["run", "--config", "small.toml", "--budget", "100000"],
        &["sweep", "--config", "small.toml", "--strategies", "bogus"],
        &["ablate", "nonsense", "--config", "small.toml"],
        &["frobnicate"],
    ] {
        let out = active_cc(args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn missing_csv_dataset_is_a_config_error() {
    let dir = setup();
    fs::write(
        dir.path().join("csv.toml"),
        "[dataset]\nkind = \"csv\"\npath = \"nope.csv\"\n",
    )
    .unwrap();
    let out = active_cc(&["run", "--config", "csv.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
