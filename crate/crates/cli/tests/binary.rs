//! Runs the real `dgo` executable.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const TRACE_HEADER: &str = "iteration,bits_per_var,best_value,accepted,evals_total,wall_ns";

fn dgo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgo"))
        .args(args)
        .env_remove("DGO_WORKERS")
        .output()
        .expect("spawn dgo")
}

fn ok(args: &[&str]) -> String {
    let o = dgo(args);
    assert!(
        o.status.success(),
        "dgo {args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn quadratic_args<'a>(trace: &'a str, backend: &'a str) -> Vec<&'a str> {
    vec![
        "optimize",
        "--objective",
        "quadratic",
        "--dims",
        "2",
        "--bits-init",
        "4",
        "--bits-max",
        "8",
        "--seed",
        "1",
        "--backend",
        backend,
        "--no-walltime",
        "--trace",
        trace,
        "--format",
        "csv",
    ]
}

#[test]
fn quadratic_trace_descends_to_the_finest_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    ok(&quadratic_args(path.to_str().unwrap(), "seq"));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, TRACE_HEADER);
    assert!(!rows.is_empty());
    let values: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]), "{values:?}");
    // each coordinate within one 8-bit step of the origin
    let step = 10.0 / 255.0;
    assert!(*values.last().unwrap() <= 2.0 * step * step);
    assert!(rows.iter().all(|r| r[5] == "0"));
    assert_eq!(rows.last().unwrap()[1], "8");
}

#[test]
fn pool_backend_writes_the_same_trace() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("seq.csv");
    let b = dir.path().join("pool.csv");
    ok(&quadratic_args(a.to_str().unwrap(), "seq"));
    ok(&quadratic_args(b.to_str().unwrap(), "pool:8"));
    assert_eq!(
        std::fs::read_to_string(a).unwrap(),
        std::fs::read_to_string(b).unwrap()
    );
}

#[test]
fn json_summary_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let stdout = ok(&[
        "optimize",
        "--objective",
        "multimodal1d",
        "--bits-max",
        "10",
        "--start",
        "3",
        "--format",
        "json",
        "--trace",
        path.to_str().unwrap(),
    ]);
    let summary: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(summary["objective"], "multimodal1d");
    assert_eq!(summary["bits_per_var"], 10);
    let trace: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let rows = trace.as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows[0].get("best_value").is_some());
}

#[test]
fn invalid_input_exits_nonzero_with_a_message() {
    let o = dgo(&["optimize", "--bits-init", "9", "--bits-max", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    assert!(!dgo(&["optimize", "--objective", "rosenbrock"])
        .status
        .success());
    assert!(!dgo(&["optimize", "--backend", "pool:0"]).status.success());
    assert!(!dgo(&["optimize", "--objective", "shekel", "--dims", "3"])
        .status
        .success());
    assert!(!dgo(&["bench", "speedup", "--workers", "2,4"])
        .status
        .success());
    assert!(!dgo(&["bench", "scaling", "--dims", "2,4"]).status.success());
}

#[test]
fn worker_count_comes_from_the_environment() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_dgo"))
            .args(["optimize", "--backend", "pool", "--bits-max", "6"])
            .env("DGO_WORKERS", workers)
            .output()
            .unwrap()
    };
    assert!(run("3").status.success());
    let bad = run("many");
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("DGO_WORKERS"));
}

#[test]
fn scaling_reports_children_per_iteration() {
    let stdout = ok(&[
        "bench",
        "scaling",
        "--dims",
        "2,4,8",
        "--bits",
        "4",
        "--reps",
        "1",
        "--min-rep-ms",
        "1",
    ]);
    let mut lines = stdout.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header
        .iter()
        .position(|h| *h == "evals_per_iteration")
        .unwrap();
    let evals: Vec<&str> = lines
        .filter(|l| !l.starts_with("fit"))
        .map(|l| l.split(',').nth(col).unwrap())
        .collect();
    assert_eq!(evals, ["15", "31", "63"]);
}

#[test]
fn xor_optimizers_share_their_start() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "train",
        "xor",
        "--optimizer",
        "both",
        "--steps",
        "200",
        "--bits-max",
        "6",
        "--max-evals",
        "2000",
        "--format",
        "json",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    let report: Value = serde_json::from_str(stdout.trim()).unwrap();
    let start_sse = report["start_sse"].as_f64().unwrap();
    for name in ["dgo", "gd"] {
        let trace: Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join(format!("{name}_trace.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(trace[0]["step"], 0);
        assert_eq!(trace[0]["sse"].as_f64().unwrap(), start_sse);
    }
    assert!(report["dgo"]["final_sse"].as_f64().unwrap() <= start_sse);
}
