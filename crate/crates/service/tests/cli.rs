//! The `workbench` binary end to end: files in, files out, exit codes.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn workbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_backtest_rank_properties_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("demand.csv");
    let snapshot = dir.path().join("dataset.json");
    let records = dir.path().join("records.jsonl");
    let ranking = dir.path().join("ranking.json");
    let props = dir.path().join("properties.json");
    std::fs::write(&csv, common::synthetic_csv(12, 30, 5)).unwrap();

    let out = workbench(&["ingest", arg(&csv), "-o", arg(&snapshot)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = workbench(&["backtest", arg(&snapshot), "-o", arg(&records)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = std::fs::read_to_string(&records).unwrap();
    assert!(lines.lines().count() > 0);
    for line in lines.lines() {
        let rec: Value = serde_json::from_str(line).unwrap();
        let acc = rec["accuracy"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&acc));
    }

    let out = workbench(&["rank", arg(&records), "-k", "3", "-o", arg(&ranking)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ranked: Value = serde_json::from_str(&std::fs::read_to_string(&ranking).unwrap()).unwrap();
    let ranked = ranked.as_array().unwrap();
    assert_eq!(ranked.len(), 9);
    assert_eq!(ranked.iter().filter(|m| m["in_top_k"] == true).count(), 3);
    let ranks: Vec<u64> = ranked.iter().map(|m| m["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, (1..=9).collect::<Vec<_>>());

    let out = workbench(&["rank", arg(&records), "--products", "P00001,P00002"]);
    assert!(out.status.success());
    let subset: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(subset
        .as_array()
        .unwrap()
        .iter()
        .all(|m| m["summary"]["product_count"].as_u64().unwrap() <= 2));

    let out = workbench(&["properties", arg(&csv), "-o", arg(&props)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let views: Value = serde_json::from_str(&std::fs::read_to_string(&props).unwrap()).unwrap();
    assert_eq!(views.as_array().unwrap().len(), 12);
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(
        &csv,
        "product_id,product_type,month,demand\na,t,2018-01,5\na,t,2018-02,-1\nb,t,2018-01,3\n",
    )
    .unwrap();
    let snapshot = dir.path().join("dataset.json");
    let out = workbench(&["ingest", arg(&csv), "-o", arg(&snapshot)]);
    assert_eq!(out.status.code(), Some(1));
    // The valid product is still written; the report names the rejected one.
    let ds: Value = serde_json::from_str(&std::fs::read_to_string(&snapshot).unwrap()).unwrap();
    assert_eq!(ds["series"].as_array().unwrap().len(), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"a\""));

    let weights = dir.path().join("weights.json");
    std::fs::write(&weights, r#"{"w_accuracy":0,"w_variance":0,"w_applicability":0}"#).unwrap();
    let records = dir.path().join("records.jsonl");
    std::fs::write(&records, "").unwrap();
    let out = workbench(&["rank", arg(&records), "--weights", arg(&weights)]);
    assert_eq!(out.status.code(), Some(1));

    let garbage = dir.path().join("garbage.jsonl");
    std::fs::write(&garbage, "{not json}\n").unwrap();
    let out = workbench(&["rank", arg(&garbage)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_failures_exit_with_two() {
    let out = workbench(&["ingest", "/nonexistent/input.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = workbench(&["properties", "/nonexistent/dataset.json"]);
    assert_eq!(out.status.code(), Some(2));
}
