//! End-to-end runs of the `g2rc` binary: output formats and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn g2rc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2rc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixtures() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").display().to_string()
}

#[test]
fn enumerate_rc_json_lines_parse() {
    let o = g2rc(&["enumerate-rc", "--lambda", "1,1", "--L", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|v| v["L"] == 3));
}

#[test]
fn enumerate_paths_lists_both_paths() {
    let o = g2rc(&["enumerate-paths", "--lambda", "1,1", "--L", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[\"4\",\"5\",\"1\"]\n[\"9\",\"2\",\"1\"]\n");
}

#[test]
fn phi_and_phi_inv_agree_on_the_walkthrough() {
    let dir = tempfile::tempdir().unwrap();
    let fixture: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(Path::new(&fixtures()).join("walkthrough.json")).unwrap()).unwrap();
    let rc_file = dir.path().join("rc.json");
    fs::write(&rc_file, fixture["rc"].to_string()).unwrap();
    let o = g2rc(&["phi", "--rc", rc_file.to_str().unwrap(), "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("step 1: letter 7"));
    assert!(out.contains("[\"7\",\"12\",\"2\",\"1\"]"));
    assert!(out.contains("charge -8 energy -8"));

    let path_file = dir.path().join("path.json");
    fs::write(&path_file, "[\"7\",\"12\",\"2\",\"1\"]").unwrap();
    let o = g2rc(&["phi-inv", "--path", path_file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rc: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rc, fixture["rc"]);
}

#[test]
fn verify_reports_one_passing_line() {
    let o = g2rc(&["verify", "--lambda", "2,0", "--L", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(r["bijective"], true);
    assert_eq!(r["statistic_ok"], true);
    assert_eq!(r["rc_count"], r["path_count"]);
    assert!(r["failures"].as_array().unwrap().is_empty());
}

#[test]
fn sweep_is_identical_across_thread_counts() {
    let one = g2rc(&["sweep", "--max-L", "4", "--jobs", "1"]);
    let four = g2rc(&["sweep", "--max-L", "4", "--jobs", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&g2rc(&["sweep", "--max-L", "0"])).lines().count(), 1);
}

#[test]
fn fixtures_all_pass() {
    let o = g2rc(&["fixtures", "--dir", &fixtures()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn graph_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b21.dot");
    let o = g2rc(&["graph", "--dot", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(out).unwrap().starts_with("digraph"));
}

#[test]
fn usage_and_io_errors_exit_with_two() {
    assert_eq!(g2rc(&["verify", "--lambda", "x", "--L", "2"]).status.code(), Some(2));
    assert_eq!(g2rc(&["phi", "--rc", "/nonexistent/rc.json"]).status.code(), Some(2));
    assert_eq!(g2rc(&["enumerate-rc", "--lambda", "0,0", "--L", "99"]).status.code(), Some(2));
}

#[test]
fn invalid_configuration_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(&f, r#"{"L":1,"nu1":[{"len":1,"rig":5}],"nu2":[]}"#).unwrap();
    assert_eq!(g2rc(&["phi", "--rc", f.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn broken_fixture_is_an_invariant_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(Path::new(&fixtures()).join("walkthrough.json")).unwrap();
    fs::write(dir.path().join("walkthrough.json"), text.replace("-8", "-9")).unwrap();
    let o = g2rc(&["fixtures", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL walkthrough"));
}
