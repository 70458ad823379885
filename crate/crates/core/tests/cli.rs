use std::path::Path;
use std::process::{Command, Output};

use sptri::harness::{read_csv_records, RunManifest, SweepRecord, CSV_HEADER, MAX_GRID_ENV};

fn sptri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sptri"))
        .args(args)
        .env_remove(MAX_GRID_ENV)
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<SweepRecord> {
    read_csv_records(out.stdout.as_slice()).unwrap()
}

fn strip_timing(mut recs: Vec<SweepRecord>) -> Vec<SweepRecord> {
    for r in &mut recs {
        r.wall_ms = 0;
    }
    recs
}

#[test]
fn dirichlet_csv_header_and_rows() {
    let out = sptri(&["dirichlet", "--n", "2:16:x2", "--p", "0.5,0.75"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let recs = records(&out);
    assert_eq!(recs.len(), 8);
    assert!(recs.iter().all(|r| r.experiment == "dirichlet" && r.value.is_finite()));
    // Canonical order: n then p.
    let keys: Vec<(u64, f64)> = recs.iter().map(|r| (r.n, r.p)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(keys, sorted);
    // Absent optional fields are empty strings.
    assert!(text.lines().nth(1).unwrap().starts_with("dirichlet,,2,0.5,"));
}

#[test]
fn jsonl_format() {
    let out = sptri(&["dirichlet", "--n", "4,8", "--p", "0.6", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["n"], 4);
    assert_eq!(rows[1]["experiment"], "dirichlet");
}

#[test]
fn reproducible_apart_from_timing() {
    let args = [
        "hankel-check",
        "--trials",
        "3",
        "--m-max",
        "16",
        "--p",
        "0.5,0.9",
        "--seed",
        "5",
    ];
    let a = strip_timing(records(&sptri(&args)));
    let b = strip_timing(records(&sptri(&args)));
    assert!(!a.is_empty());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((&x.experiment, x.n, x.p, x.seed), (&y.experiment, y.n, y.p, y.seed));
        assert!((x.value - y.value).abs() <= 1e-9 * x.value.abs().max(1.0));
    }
}

#[test]
fn out_file_gets_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = sptri(&[
        "witness",
        "--k-max",
        "4",
        "--p",
        "0.5,0.8",
        "--include-p1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let recs = read_csv_records(std::fs::File::open(&path).unwrap()).unwrap();
    assert!(recs
        .iter()
        .any(|r| r.experiment == "witness" && r.k == Some(4) && r.n == 16));
    assert!(recs.iter().any(|r| r.experiment == "witness-log"));
    let manifest = RunManifest::read(&RunManifest::path_for(&path)).unwrap();
    assert_eq!(manifest.command, "witness");
    assert_eq!(manifest.tool, "sptri");
    assert_eq!(manifest.quadrature.rel_tol, 1e-7);
    assert!(Path::new(&RunManifest::path_for(&path)).exists());
}

#[test]
fn selftest_passes() {
    let out = sptri(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("ok")));
    assert!(text.contains("mask-identity"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["hankel-check", "--trials", "0"][..],
        &["witness", "--k-max", "13"],
        &["dirichlet", "--p", "0.9:0.5"],
        &["dirichlet", "--p", "abc"],
        &["no-such-command"],
        &["dirichlet", "--format", "xml"],
    ] {
        let out = sptri(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_max_grid_env_is_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_sptri"))
        .args(["dirichlet", "--n", "4", "--p", "0.5"])
        .env(MAX_GRID_ENV, "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quadrature_failure_exits_1_with_nan() {
    let out = Command::new(env!("CARGO_BIN_EXE_sptri"))
        .args(["dirichlet", "--n", "1024", "--p", "0.5", "--quad-tol", "1e-12"])
        .env(MAX_GRID_ENV, "8192")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert!(recs[0].value.is_nan());
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}
