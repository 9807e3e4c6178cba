use std::process::Command;

use prosolv::report::{to_json, without_timing};
use prosolv::{execute, REPORT_DIR_ENV};
use serde_json::Value;

fn run(args: &[&str]) -> prosolv::Execution {
    let mut argv = vec!["prosolv"];
    argv.extend_from_slice(args);
    execute(argv)
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend_from_slice(&["--format", "json"]);
    let ex = run(&a);
    let v: Value = serde_json::from_str(&ex.stdout).expect("stdout is JSON");
    (ex.code, v)
}

const CORRUPT_M0: &str = r#"{
  "name": "m0-corrupt",
  "rules": [
    {"left": {"kind": "E", "var": "i", "min": 2},
     "right": {"kind": "E", "min": 1, "max": 1},
     "terms": [{"target": {"kind": "E", "index": {"i": 1, "const": 1}}}]},
    {"left": {"kind": "E", "min": 2, "max": 2},
     "right": {"kind": "E", "min": 3, "max": 3},
     "terms": [{"target": {"kind": "E", "index": {"const": 5}}}]}
  ]
}"#;

#[test]
fn jacobi_m0_succeeds() {
    let (code, r) = json(&["jacobi", "--family", "m0", "--N", "20"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["ok"], true);
    assert_eq!(r["inputs"]["window"]["N"], 20);
}

#[test]
fn h2_m0t_vanishes() {
    let (code, r) = json(&["h2", "--family", "M0t", "--N", "8", "--B", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["h2_interior"], 0);
}

#[test]
fn der_m0_interior_dimension() {
    let (code, r) = json(&["der", "--family", "m0", "--N", "8"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["interior_dim"], 15);
}

#[test]
fn report_has_envelope_fields() {
    let (_, r) = json(&["table", "--family", "m2", "--N", "6"]);
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["verb", "inputs", "results", "versions", "timing"]);
    assert_eq!(r["results"]["dim"], 6);
    assert_eq!(r["results"]["basis"][0], "e1");
}

#[test]
fn catalog_lists_seven_families() {
    let (code, r) = json(&["catalog"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = r["results"]["families"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["m0", "m2", "M0", "M2", "M0t", "M2t", "wittpos"]);
}

#[test]
fn json_round_trip_is_byte_identical() {
    for args in [
        &["jacobi", "--family", "M0", "--params", "1,-2/3", "--N", "9"][..],
        &["h2", "--family", "M2t", "--N", "9"][..],
        &["catalog"][..],
    ] {
        let (_, r) = json(args);
        let once = to_json(&r);
        let back: Value = serde_json::from_str(&once).unwrap();
        assert_eq!(to_json(&back), once);
    }
}

#[test]
fn repeated_runs_agree_without_timing() {
    let args = ["h2", "--family", "M0t", "--N", "6", "--B", "1", "--seed", "3"];
    let (_, a) = json(&args);
    let (_, b) = json(&args);
    assert_eq!(to_json(&without_timing(&a)), to_json(&without_timing(&b)));
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(run(&["jacobi", "--family", "m7"]).code, 2);
    assert_eq!(run(&["jacobi"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["jacobi", "--family", "m0", "--presentation", "p.json"]).code, 2);
    assert_eq!(run(&["jacobi", "--family", "M0"]).code, 2);
    assert_eq!(run(&["jacobi", "--family", "m0", "--params", "1"]).code, 2);
    assert_eq!(run(&["jacobi", "--family", "M2", "--params", "x"]).code, 2);
    assert_eq!(run(&["jacobi", "--family", "m0", "--N", "4", "--B", "4"]).code, 2);
    // Witness needs N >= j_min + 4.
    assert_eq!(run(&["witness", "--family", "M2t", "--N", "8"]).code, 2);
    assert_eq!(run(&["witness", "--family", "M0t", "--N", "12"]).code, 2);
    assert!(run(&["jacobi", "--family", "m7"]).stderr.contains("unknown family"));
}

#[test]
fn help_exits_zero() {
    let ex = run(&["--help"]);
    assert_eq!(ex.code, 0);
    assert!(ex.stdout.contains("witness"));
}

#[test]
fn presentation_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("corrupt.json");
    std::fs::write(&bad, CORRUPT_M0).unwrap();
    let (code, r) = json(&["jacobi", "--presentation", bad.to_str().unwrap(), "--N", "10"]);
    assert_eq!(code, 1);
    assert_eq!(r["results"]["status"], "check_failed");
    assert_eq!(r["results"]["first_failure"]["triple"], serde_json::json!(["e1", "e2", "e3"]));
    // Later verbs stop at the failed Jacobi gate.
    let (code, r) = json(&["der", "--presentation", bad.to_str().unwrap(), "--N", "8"]);
    assert_eq!(code, 1);
    assert!(r["results"].get("raw_dim").is_none());

    let malformed = dir.path().join("malformed.json");
    std::fs::write(&malformed, "{\"name\": ").unwrap();
    assert_eq!(run(&["jacobi", "--presentation", malformed.to_str().unwrap()]).code, 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["jacobi", "--presentation", missing.to_str().unwrap()]).code, 2);
}

#[test]
fn presentation_file_matches_catalog() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/examples/m0.json");
    let (code, a) = json(&["table", "--presentation", file, "--N", "10"]);
    assert_eq!(code, 0);
    let (_, b) = json(&["table", "--family", "m0", "--N", "10"]);
    assert_eq!(a["results"]["brackets"], b["results"]["brackets"]);
    let witt = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/examples/wittpos.json");
    assert_eq!(run(&["jacobi", "--presentation", witt, "--N", "15"]).code, 0);
}

#[test]
fn out_file_and_report_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested").join("r.json");
    let ex = run(&["jacobi", "--family", "m2", "--N", "8", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(ex.code, 0);
    assert!(ex.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["verb"], "jacobi");

    // The environment is process-wide, so exercise it through the binary.
    let status = Command::new(env!("CARGO_BIN_EXE_prosolv"))
        .args(["series", "--family", "m0", "--N", "7"])
        .env(REPORT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&status.stdout).contains("prosolv series: ok"));
    assert!(dir.path().join("series_m0_N7_B0.json").exists());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_prosolv");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["catalog"]), Some(0));
    assert_eq!(code(&["jacobi", "--family", "nope"]), Some(2));
    assert_eq!(code(&["h2", "--family", "M2t", "--N", "10", "--B", "4"]), Some(1));
}

#[test]
fn parameterized_presentation_file_matches_catalog() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/examples/M0-beta.json");
    let (code, a) = json(&["table", "--presentation", file, "--N", "9"]);
    assert_eq!(code, 0);
    let (_, b) = json(&["table", "--family", "M0", "--params", "1,-1/2", "--N", "9"]);
    assert_eq!(a["results"]["brackets"], b["results"]["brackets"]);
}
