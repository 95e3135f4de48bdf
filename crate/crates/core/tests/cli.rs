use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cartdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartdec")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn construct_fullex(dir: &Path) {
    let out = cartdec(&["construct", "--example", "fullex", "--simple", "A6", "--k", "1", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["group.json", "decomposition.json", "system.json", "report.json"] {
        assert!(dir.join(f).exists(), "{f} missing");
    }
}

/// Rows and columns of a 6 × 6 grid on points `0..36`.
fn plain_grid() -> String {
    let rows: Vec<Vec<u32>> = (0..6).map(|r| (0..6).map(|c| 6 * r + c).collect()).collect();
    let cols: Vec<Vec<u32>> = (0..6).map(|c| (0..6).map(|r| 6 * r + c).collect()).collect();
    serde_json::to_string(&vec![rows, cols]).unwrap()
}

#[test]
fn construct_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    construct_fullex(dir.path());
    let g = dir.path().join("group.json");
    let e = dir.path().join("decomposition.json");
    let out = cartdec(&["analyze", "--group", g.to_str().unwrap(), "--decomp", e.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["config"]["command"], "analyze");
    assert_eq!(r["result"]["s"], 2);
    let labels: Vec<&str> = r["result"]["orbits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["classification"]["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["CD_1", "CD_1"]);
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    construct_fullex(dir.path());
    let g = dir.path().join("group.json");
    let e = dir.path().join("decomposition.json");
    let args = ["analyze", "--group", g.to_str().unwrap(), "--decomp", e.to_str().unwrap()];
    assert_eq!(cartdec(&args).stdout, cartdec(&args).stdout);
}

#[test]
fn non_invariant_decomposition_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    construct_fullex(dir.path());
    let g = dir.path().join("group.json");
    let e = dir.path().join("grid.json");
    std::fs::write(&e, plain_grid()).unwrap();
    let out = cartdec(&["analyze", "--group", g.to_str().unwrap(), "--decomp", e.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["status"], "input-error");
    let msg = r["error"]["message"].as_str().unwrap();
    assert!(msg.contains("generator"), "{msg}");
}

#[test]
fn garbage_group_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, r#"{"degree": 3, "generators": [[1, 1, 0]]}"#).unwrap();
    let out = cartdec(&["enumerate", "--group", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_suite_passes() {
    let out = cartdec(&["verify", "--suite", "tables"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(&out)["status"], "ok");
}

#[test]
fn unknown_flags_are_rejected() {
    let out = cartdec(&["verify", "--suite", "tables", "--colour"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn heavy_example_needs_the_flag() {
    let out = cartdec(&["construct", "--example", "smf", "--simple", "Sp6(2)", "--k", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["status"], "limit");
}

#[test]
fn text_format_renders_the_report() {
    let dir = tempfile::tempdir().unwrap();
    construct_fullex(dir.path());
    let g = dir.path().join("group.json");
    let e = dir.path().join("decomposition.json");
    let out = cartdec(&["--format", "text", "classify", "--group", g.to_str().unwrap(), "--decomp", e.to_str().unwrap()]);
    // The grid has two orbits under this group, so it cannot be classified as a whole.
    assert_eq!(out.status.code(), Some(2));
    let out = cartdec(&["--format", "text", "analyze", "--group", g.to_str().unwrap(), "--decomp", e.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("CD_1"));
}

#[test]
fn unrepresentable_order_is_a_resource_limit() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("sym40.json");
    let n = 40u32;
    let swap: Vec<u32> = (0..n).map(|i| match i { 0 => 1, 1 => 0, i => i }).collect();
    let cycle: Vec<u32> = (0..n).map(|i| (i + 1) % n).collect();
    let text = serde_json::json!({ "degree": n, "generators": [swap, cycle] }).to_string();
    std::fs::write(&g, text).unwrap();
    let out = cartdec(&["enumerate", "--group", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
}
