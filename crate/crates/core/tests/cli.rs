mod common;

use std::process::{Command, Output};

use common::*;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onerel")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn analyze_reports_verdicts() {
    let out = run(&["analyze", "--word", "bat"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["inputs"]["rank"], 2);
    assert_eq!(v["output"]["status"], "Surjective");
    assert_eq!(v["output"]["evidence"]["t_image"], "AB");

    let out = run(&["analyze", "--word", "bTatat", "--conj-len", "1", "--products", "2", "--max-degree", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["output"]["reason"], "MainTheorem");
    assert_eq!(v["output"]["evidence"]["corroboration"]["search_witness"], Value::Null);

    let v = stdout_json(&run(&["analyze", "--word", "tt"]));
    assert_eq!(v["output"]["status"], "NotSurjective");
    assert_eq!(v["output"]["evidence"]["exponent_sum"], 2);
}

#[test]
fn output_is_deterministic() {
    let path = data_path("random_seed0_size3.json");
    let path = path.to_str().unwrap();
    for args in [
        vec!["analyze", "--word", "aTatt", "--conj-len", "2", "--max-degree", "4"],
        vec!["simulate", "--complex", path, "--seed", "4"],
        vec!["search-kernel", "--word", "bTatat", "--conj-len", "2", "--products", "2"],
        vec!["generate", "--seed", "9", "--size", "4"],
    ] {
        let first = run(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        assert_eq!(first.stdout, run(&args).stdout, "{args:?}");
    }
}

#[test]
fn simulate_emits_json_lines() {
    let path = data_path("bigon.json");
    let out = run(&["simulate", "--complex", path.to_str().unwrap(), "--horizon", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let (report, events) = lines.split_last().unwrap();
    assert_eq!(report["command"], "simulate");
    assert!(!events.is_empty());
    for e in events {
        assert!(e["time"].is_string());
        assert!(e["site"]["kind"] == "vertex" || e["site"]["kind"] == "edge");
    }
}

#[test]
fn generated_complexes_validate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--seed", "3", "--size", "3"]);
    let file = dir.path().join("g.json");
    std::fs::write(&file, &out.stdout).unwrap();
    let out = run(&["validate", "--complex", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["output"]["validation"]["euler_characteristic"], 2);
}

#[test]
fn validate_runs_the_subdivision_checks() {
    let path = data_path("mirrored.json");
    let out = run(&["validate", "--complex", path.to_str().unwrap(), "--word", "bTatct", "--phi", "a=d", "--h", "A"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["output"]["csl"]["f"]["passed"], false);
    assert_eq!(v["output"]["csl"]["a"]["passed"], true);
}

#[test]
fn input_errors_exit_with_two() {
    let missing = data_path("no_such_file.json");
    for args in [
        vec!["analyze", "--word", "a#"],
        vec!["analyze", "--word", "ct", "--rank", "2"],
        vec!["decompose", "--word", "tt"],
        vec!["search-kernel", "--word", "bTatat", "--target-shape", "(1,0)"],
        vec!["simulate", "--complex", missing.to_str().unwrap()],
        vec!["validate", "--complex", data_path("bigon.json").to_str().unwrap(), "--word", "at", "--phi", "ab"],
        vec!["certify", "--word", "at", "--max-degree", "12"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn certify_and_decompose() {
    let v = stdout_json(&run(&["certify", "--word", "aTatt", "--max-degree", "3"]));
    assert_eq!(v["output"]["verdict"]["status"], "NotSurjective");
    assert_eq!(v["output"]["verdict"]["evidence"]["certificate"]["images"]["t"], serde_json::json!([1, 2, 0]));
    let v = stdout_json(&run(&["certify", "--word", "at", "--max-degree", "4", "--order-of", "t"]));
    assert_eq!(v["output"]["verdict"]["status"], "Undetermined");
    assert_eq!(v["output"]["order_evidence"]["best"], 4);
    let out = run(&["decompose", "--word", "abtTTbtat"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_json(&out)["output"]["m"].as_u64().unwrap() >= 1);
}
