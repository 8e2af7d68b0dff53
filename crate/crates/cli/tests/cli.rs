//! End-to-end checks of the command-line surface: exit codes, JSON output
//! shapes, report determinism across worker counts.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn circstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circstab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("circstab-test-{}-{}", std::process::id(), name));
    p
}

#[test]
fn analyze_stable_circulant_exits_zero() {
    let out = circstab(&["analyze", "--order", "5", "--set", "1,4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("stable"));
    assert!(text.contains("|Aut(X)| = 10"));
}

#[test]
fn analyze_json_record_is_well_formed() {
    let out = circstab(&["analyze", "--order", "9", "--set", "1,2,4,5,7,8", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(record["verdict"]["status"], "trivially-unstable");
    assert_eq!(record["verdict"]["reason"], "reducible");
    assert_eq!(record["n"], 9);
}

#[test]
fn invalid_connection_set_exits_one() {
    let out = circstab(&["analyze", "--order", "5", "--set", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("inverse-closed"));
}

#[test]
fn unknown_flag_exits_one() {
    let out = circstab(&["analyze", "--order", "5", "--set", "1,4", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = circstab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verify-theorem"));
}

#[test]
fn verify_theorem_holds_and_emits_json() {
    let out = circstab(&["verify-theorem", "--max-order", "9", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["counterexamples"].as_array().unwrap().len(), 0);
    assert_eq!(report["max_order"], 9);
}

#[test]
fn verify_theorem_rejects_even_bound() {
    let out = circstab(&["verify-theorem", "--max-order", "8"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_theorem_cap_is_a_capacity_error() {
    let out = circstab(&["verify-theorem", "--max-order", "17"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let one = temp_path("jobs1.jsonl");
    let four = temp_path("jobs4.jsonl");
    let a = circstab(&[
        "sweep",
        "--orders",
        "6..6",
        "--jobs",
        "1",
        "--out",
        one.to_str().unwrap(),
    ]);
    let b = circstab(&[
        "sweep",
        "--orders",
        "6..6",
        "--jobs",
        "4",
        "--out",
        four.to_str().unwrap(),
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(fs::read(&one).unwrap(), fs::read(&four).unwrap());
    assert_eq!(
        fs::read(one.with_extension("csv")).unwrap(),
        fs::read(four.with_extension("csv")).unwrap()
    );
    for p in [&one, &four] {
        let _ = fs::remove_file(p);
        let _ = fs::remove_file(p.with_extension("csv"));
    }
}

#[test]
fn sweep_accepts_single_order_and_counts_records() {
    let out_path = temp_path("single.jsonl");
    let out = circstab(&[
        "sweep",
        "--orders",
        "4",
        "--no-dedup",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let jsonl = fs::read_to_string(&out_path).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
    let _ = fs::remove_file(&out_path);
    let _ = fs::remove_file(out_path.with_extension("csv"));
}

#[test]
fn sweep_over_the_cap_is_a_capacity_error() {
    let out = circstab(&[
        "sweep",
        "--orders",
        "3..20",
        "--out",
        "/tmp/never-written.jsonl",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_to_unwritable_path_is_an_io_error() {
    let out = circstab(&[
        "sweep",
        "--orders",
        "4..4",
        "--out",
        "/nonexistent-dir/x.jsonl",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn aut_prints_generators_and_order() {
    let out = circstab(&["aut", "--order", "5", "--set", "1,4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("order: 10"));
    assert!(text.contains("(0 1 2 3 4)"));
}

#[test]
fn aut_graph_reads_json_edge_lists() {
    let path = temp_path("pentagon.json");
    fs::write(&path, r#"{"n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[0,4]]}"#).unwrap();
    let out = circstab(&["aut-graph", "--edges", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("order: 10"));
    let _ = fs::remove_file(&path);
}

#[test]
fn aut_graph_rejects_bad_files() {
    let path = temp_path("loop.json");
    fs::write(&path, r#"{"n":2,"edges":[[0,0]]}"#).unwrap();
    let out = circstab(&["aut-graph", "--edges", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let _ = fs::remove_file(&path);

    let out = circstab(&["aut-graph", "--edges", "/does/not/exist.json"]);
    assert_eq!(out.status.code(), Some(1));
}
