use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn syswork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syswork")).args(args).current_dir(models()).output().expect("run syswork")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn verify_is_deterministic_and_matches_golden() {
    let a = syswork(&["verify", "thm22", "heisenberg.json", "--m", "1", "--seed", "7"]);
    let b = syswork(&["verify", "thm22", "heisenberg.json", "--m", "1", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/heisenberg_thm22.json");
    if std::env::var_os("SYSWORK_BLESS").is_some() {
        std::fs::write(&golden, &a.stdout).unwrap();
    }
    let expected = std::fs::read(&golden).expect("golden file");
    assert!(expected == a.stdout, "report differs from {}", golden.display());
}

#[test]
fn report_shape() {
    let out = syswork(&["verify", "thm22", "heisenberg.json", "--seed", "7"]);
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["status"], "pass");
    let run = &v["runs"][0]["report"];
    assert_eq!(run["triple"]["indices"], serde_json::json!([1, 1, 2]));
    assert_eq!(run["triple"]["pairing"].as_i64().unwrap().abs(), 1);
    assert!(run["chain"].as_array().unwrap().iter().all(|l| l["holds"] == true));
}

#[test]
fn unknown_selector_is_usage_error() {
    let out = syswork(&["verify", "thm99", "heisenberg.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown selector"));
    assert_eq!(syswork(&["verify"]).status.code(), Some(2));
    assert_eq!(syswork(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(syswork(&["verify", "thm22", "missing.json"]).status.code(), Some(2));
    assert_eq!(syswork(&["verify", "thm22", "heisenberg.json", "--grid", "t:1:2"]).status.code(), Some(2));
}

#[test]
fn torus_is_refused_with_report() {
    let out = syswork(&["verify", "thm22", "torus3.json"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["status"], "refused");
    let checks = v["hypotheses"]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "cup_zero" && c["holds"] == false));
}

#[test]
fn grid_run_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    let out = syswork(&["verify", "thm22", "heisenberg.json", "--grid", "t:-2:2:9", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["runs"].as_array().unwrap().len(), 9);
    assert_eq!(v["grid"]["iq_trend"], "decreasing");
    let margins: Vec<f64> = v["grid"]["dimensionless_margins"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(margins.iter().all(|m| *m >= 0.0));
}

#[test]
fn cohomology_massey_minima_systoles() {
    let v = json(&syswork(&["cohomology", "heisenberg.json"]));
    assert_eq!(v["betti"], serde_json::json!([1, 2, 2, 1]));
    let v = json(&syswork(&["massey", "heisenberg.json", "--degree", "1"]));
    assert_eq!(v["triples"].as_array().unwrap().len(), 8);
    let v = json(&syswork(&["minima", "lattice_linf.json"]));
    assert_eq!(v["products_at_least_one"], true);
    let v = json(&syswork(&["systoles", "heisenberg.json", "--degrees", "1,2"]));
    assert_eq!(v["degrees"].as_array().unwrap().len(), 2);
    let v = json(&syswork(&["cohomology", "torus2_simplicial.json"]));
    assert_eq!(v["betti"], serde_json::json!([1, 2, 1]));
}
