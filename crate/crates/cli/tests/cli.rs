use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqm")).args(args).output().expect("spawn fqm")
}

fn lattice(dir: &TempDir, name: &str, gram: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, format!("{{\"gram\": {gram}}}")).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout));
    })
}

#[test]
fn analyze_a2() {
    let dir = TempDir::new().unwrap();
    let a2 = lattice(&dir, "a2.json", "[[2,-1],[-1,2]]");
    let out = fqm(&["analyze", a2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["profile"]["level"], 3);
    assert_eq!(v["profile"]["sig"], 2);
    assert_eq!(v["discriminant"]["order"], 3);
    assert_eq!(v["anisotropic"], true);
    assert_eq!(v["milgram_signature"], 2);
    assert_eq!(v["classification"]["3"]["status"], "classified");
    assert_eq!(v["weil_relations"]["st_cubed_is_z"], true);
}

#[test]
fn analyze_hyperbolic_plane_is_trivial() {
    let dir = TempDir::new().unwrap();
    let u = lattice(&dir, "u.json", "[[0,1],[1,0]]");
    let v = stdout_json(&fqm(&["analyze", u.to_str().unwrap()]));
    assert_eq!(v["discriminant"]["order"], 1);
    assert_eq!(v["discriminant"]["level"], 1);
    assert_eq!(v["milgram_signature"], 0);
    assert_eq!(v["profile"]["witt_index"], 1);
    assert!(v["classification"].as_object().unwrap().is_empty());
}

#[test]
fn output_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let a2 = lattice(&dir, "a2.json", "[[2,-1],[-1,2]]");
    let target = dir.path().join("out.json");
    let out = fqm(&["gauss", a2.to_str().unwrap(), "-o", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["milgram_signature"], 2);
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_fqm"))
        .args(["gauss", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(br#"{"gram": [[2,1],[1,2]]}"#).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["order"], 3);
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"gram\": [[2,").unwrap();
    assert_eq!(fqm(&["analyze", bad.to_str().unwrap()]).status.code(), Some(64));

    let odd = lattice(&dir, "odd.json", "[[1]]");
    assert_eq!(fqm(&["analyze", odd.to_str().unwrap()]).status.code(), Some(64));

    let asym = lattice(&dir, "asym.json", "[[2,1],[0,2]]");
    assert_eq!(fqm(&["analyze", asym.to_str().unwrap()]).status.code(), Some(64));

    let deg = lattice(&dir, "deg.json", "[[2,2],[2,2]]");
    assert_eq!(fqm(&["analyze", deg.to_str().unwrap()]).status.code(), Some(65));

    assert_eq!(fqm(&["bogus"]).status.code(), Some(64));
    assert_eq!(fqm(&["scan", "--max-order", "10001"]).status.code(), Some(64));
    assert_eq!(fqm(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_converse_exit_codes() {
    let dir = TempDir::new().unwrap();
    // A2 + U + U: signature (4, 2), fails m mod 4 and the rank bound.
    let small = lattice(
        &dir,
        "small.json",
        "[[2,-1,0,0,0,0],[-1,2,0,0,0,0],[0,0,0,1,0,0],[0,0,1,0,0,0],[0,0,0,0,0,1],[0,0,0,0,1,0]]",
    );
    let out = fqm(&["check-converse", small.to_str().unwrap(), "--bound", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["failing"], serde_json::json!(["m_mod4", "m_bound"]));
}

#[test]
fn check_converse_pass_with_split() {
    // A4 + U + U: signature (6, 2), |A| = 5.
    let dir = TempDir::new().unwrap();
    let n = 8;
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..4 {
        g[i][i] = 2;
        if i > 0 {
            g[i][i - 1] = -1;
            g[i - 1][i] = -1;
        }
    }
    for i in [4, 6] {
        g[i][i + 1] = 1;
        g[i + 1][i] = 1;
    }
    let path = lattice(&dir, "big.json", &serde_json::to_string(&g).unwrap());
    let out = fqm(&["check-converse", path.to_str().unwrap(), "--bound", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["report"]["failing"], serde_json::json!([]), "{v}");
    assert_eq!(out.status.code(), Some(0));
    assert!(v["split"].is_object());
}

#[test]
fn scan_counts() {
    let v = stdout_json(&fqm(&["scan", "--max-order", "3"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["label"], "trivial");

    let v = stdout_json(&fqm(&["scan", "--max-order", "15"]));
    let at15 = v.as_array().unwrap().iter().filter(|r| r["order"] == 15).count();
    assert_eq!(at15, 4);
}

#[test]
fn scan_csv_header() {
    let out = fqm(&["scan", "--max-order", "5", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("label,order,milgram_signature"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn theta_csv_and_modularity() {
    let dir = TempDir::new().unwrap();
    let a2 = lattice(&dir, "a2.json", "[[2,-1],[-1,2]]");
    let out = fqm(&["theta", a2.to_str().unwrap(), "--n-max", "1", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0,1,6"));

    let out = fqm(&["theta", a2.to_str().unwrap(), "--tau", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["modularity"]["max_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn weil_gamma_and_relations() {
    let dir = TempDir::new().unwrap();
    let a2 = lattice(&dir, "a2.json", "[[2,-1],[-1,2]]");
    let out = fqm(&["weil", a2.to_str().unwrap(), "--gamma", "0,-1,1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["rho_s"], v["rho_gamma"]);
    assert_eq!(fqm(&["weil", a2.to_str().unwrap(), "--gamma", "2,1,1,2"]).status.code(), Some(1));
}

#[test]
fn reflective_round_trip() {
    let dir = TempDir::new().unwrap();
    let a2 = lattice(&dir, "a2.json", "[[2,-1],[-1,2]]");
    let pp = dir.path().join("pp.json");
    std::fs::write(&pp, r#"{"c00": "0", "terms": [{"mu": [1], "n": "-1/3", "c": "1"}]}"#).unwrap();
    let out = fqm(&["reflective", a2.to_str().unwrap(), "--principal-part", pp.to_str().unwrap(), "--symmetrize"]);
    let v = stdout_json(&out);
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&v["principal_part"]).unwrap()).unwrap();
    assert_eq!(reparsed, v["principal_part"]);
    assert_eq!(v["principal_part"]["terms"].as_array().unwrap().len(), 2);
    assert_eq!(out.status.code(), Some(if v["verdict"]["pass"] == true { 0 } else { 2 }));
}

#[test]
fn lfactor_assembly_missing_input() {
    let dir = TempDir::new().unwrap();
    let a2 = lattice(&dir, "a2.json", "[[2,-1],[-1,2]]");
    let out = fqm(&["lfactor", a2.to_str().unwrap(), "--m", "12", "--primes", "5", "--vol", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}
