use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn geomext(args: &[&str], out: &Path) -> (i32, Value) {
    let o = Command::new(env!("CARGO_BIN_EXE_geomext"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("runs");
    let code = o.status.code().expect("exit code");
    let json = std::fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap())
        .unwrap_or(Value::Null);
    (code, json)
}

fn dims(stalk: &Value, upto: i32) -> Vec<usize> {
    (0..=upto)
        .map(|n| stalk["structure"][n.to_string()].as_array().map_or(0, Vec::len))
        .collect()
}

fn apex_row(table: &Value) -> &Value {
    table["rows"].as_array().unwrap().iter().find(|r| r["complex_dim"] == 0).unwrap()
}

#[test]
fn geomext_on_the_cone_mod_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, j) = geomext(&["geomext", "--fixture", "cone(rp3)", "--coeffs", "F2"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(j["schema_version"], 1);
    assert_eq!(dims(&apex_row(&j["extension"]["stalk_table"])["stalk"], 2), vec![1, 0, 1]);
    assert_eq!(j["extension"]["certificates"]["indecomposable"], true);
}

#[test]
fn ic_on_the_cone_rationally() {
    let dir = tempfile::tempdir().unwrap();
    let (code, j) = geomext(&["ic", "--fixture", "cone(rp3)", "--coeffs", "Q"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(dims(&apex_row(&j["tables"]["ic"])["stalk"], 2), vec![1, 0, 0]);
}

#[test]
fn compare_on_two_subdivisions() {
    let dir = tempfile::tempdir().unwrap();
    let (code, j) = geomext(&["compare", "--fixture", "cone(rp3)", "--first", "0", "--second", "1"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(j["verdicts"]["verdict"], "isomorphic");
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["decompose", "--fixture", "cone(rp3)", "--coeffs", "F3", "--resolution", "0", "--seed", "5"];
    geomext(&args, dir.path());
    let a = std::fs::read(dir.path().join("decompose.json")).unwrap();
    let t = std::fs::read(dir.path().join("decompose.txt")).unwrap();
    geomext(&args, dir.path());
    assert_eq!(a, std::fs::read(dir.path().join("decompose.json")).unwrap());
    assert_eq!(t, std::fs::read(dir.path().join("decompose.txt")).unwrap());
}

#[test]
fn monodromy_of_the_degenerating_family() {
    let dir = tempfile::tempdir().unwrap();
    let (code, j) = geomext(&["monodromy", "--fixture", "i2_local_model", "--coeffs", "Z/4"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(j["verdicts"]["trivial"], false);
    assert_eq!(j["verdicts"]["canonical_form"], serde_json::json!([["1", "0"], ["2", "1"]]));
}

#[test]
fn exit_codes_for_failures() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = geomext(&["geomext", "--fixture", "klein_bottle"], dir.path());
    assert_eq!(code, 1);
    let (code, _) = geomext(&["geomext", "--fixture", "torus", "--coeffs", "F4"], dir.path());
    assert_eq!(code, 1);
    // cells 0 and 1 are two vertices, not a vertex-edge path
    let (code, _) = geomext(&["monodromy", "--fixture", "sphere(2)", "--cycle", "0,1"], dir.path());
    assert_eq!(code, 1);
}

#[test]
fn strat_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let strat = dir.path().join("strat.json");
    let cells: Vec<usize> = (0..26).collect();
    std::fs::write(&strat, serde_json::json!({"strata": [{"cells": cells, "complex_dim": 1}]}).to_string()).unwrap();
    let out = dir.path().join("out");
    let (code, j) = geomext(&["ic", "--fixture", "sphere(2)", "--strat", strat.to_str().unwrap()], &out);
    assert_eq!(code, 0);
    assert_eq!(j["verdicts"]["perverse_shift"], 1);
}
