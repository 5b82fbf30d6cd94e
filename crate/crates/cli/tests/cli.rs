use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nehari(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nehari")).args(args).env_remove("NEHARI_QUAD_BUDGET").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const F2: &str = r#"{"d": 2, "terms": [{"n": 2, "re": 1.0}, {"n": 3, "re": 1.0}]}"#;

#[test]
fn certify_d2_json() {
    let out = nehari(&["certify", "--d", "2", "--format", "json", "--samples", "20000"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["C_d_lower"]["computed"].as_f64().unwrap() - 1.110721).abs() < 1e-6);
    assert_eq!(v["certified"], true);
}

#[test]
fn certify_rejects_odd_and_bad_flags() {
    assert_eq!(code(&nehari(&["certify", "--d", "3"])), 2);
    assert_eq!(code(&nehari(&["certify", "--d", "2", "--format", "xml"])), 2);
    assert_eq!(code(&nehari(&["certify", "--d", "14"])), 2);
    assert_eq!(code(&nehari(&["bogus"])), 2);
}

#[test]
fn certify_csv_row() {
    let out = nehari(&["certify", "--d", "4", "--format", "csv", "--samples", "20000"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(header.len(), row.len());
    assert_eq!(row[0], "4");
    assert_eq!(row[1], "true");
}

#[test]
fn certify_json_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out =
            nehari(&["certify", "--d", "4", "--seed", "7", "--samples", "20000", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn certify_budget_exceeded() {
    let out = nehari(&["certify", "--d", "2", "--samples", "1000", "--budget", "10"]);
    assert_eq!(code(&out), 3);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["certified"], false);
    assert!(v["failure"].is_string());
}

#[test]
fn certify_human() {
    let out = nehari(&["certify", "--d", "2", "--format", "human", "--samples", "20000"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("CERTIFIED") && text.contains("1.11072"));
}

#[test]
fn sweep_rows() {
    let out = nehari(&["sweep", "--d-min", "2", "--d-max", "12", "--format", "csv", "--samples", "20000"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 7);
    let out = nehari(&["sweep", "--d-min", "2", "--d-max", "8", "--samples", "20000"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let slope = v["fitted_slope"].as_f64().unwrap();
    assert!((slope - (std::f64::consts::PI.powi(2) / 8.0).ln() / 4.0).abs() < 1e-6);
    assert_eq!(code(&nehari(&["sweep", "--d-min", "8", "--d-max", "6"])), 2);
}

#[test]
fn norm_values() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = write(dir.path(), "f2.json", F2);
    let f2 = f2.to_str().unwrap();
    let l1 = nehari(&["norm", "--kind", "l1", "--poly", f2, "--method", "separable"]);
    assert_eq!(code(&l1), 0);
    assert!(stdout(&l1).starts_with("1.27324"));
    let hankel = nehari(&["norm", "--kind", "hankel", "--poly", f2]);
    assert!(stdout(&hankel).starts_with("1.41421"));
    let schur = nehari(&["norm", "--kind", "schur", "--poly", f2]);
    assert!(stdout(&schur).starts_with("1.41421"));
    let wf = nehari(&["norm", "--kind", "wf", "--poly", f2, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&wf)).unwrap();
    assert!((v["upper"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-6);
    assert!((v["lower"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
    let mc = |seed: &str| {
        stdout(&nehari(&[
            "norm",
            "--kind",
            "l1",
            "--poly",
            f2,
            "--method",
            "mc",
            "--seed",
            seed,
            "--samples",
            "5000",
            "--format",
            "json",
        ]))
    };
    assert_eq!(mc("3"), mc("3"));
}

#[test]
fn norm_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"d": 2, "terms": [{"n": 5, "re": 1.0}]}"#);
    assert_eq!(code(&nehari(&["norm", "--kind", "l1", "--poly", bad.to_str().unwrap()])), 2);
    let garbage = write(dir.path(), "garbage.json", "not json");
    assert_eq!(code(&nehari(&["norm", "--kind", "l2", "--poly", garbage.to_str().unwrap()])), 2);
    assert_eq!(code(&nehari(&["norm", "--kind", "l2", "--poly", "/nonexistent/f.json"])), 2);
    let f2 = write(dir.path(), "f2.json", F2);
    let out = Command::new(env!("CARGO_BIN_EXE_nehari"))
        .args(["norm", "--kind", "l1", "--poly", f2.to_str().unwrap(), "--method", "quad"])
        .env("NEHARI_QUAD_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn construct_dump() {
    let out = nehari(&["construct", "--d", "4"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let psi: Vec<u64> = v["psi"]["terms"].as_array().unwrap().iter().map(|t| t["n"].as_u64().unwrap()).collect();
    assert_eq!(psi, vec![10, 14, 15, 21]);
    assert_eq!(v["J"].as_array().unwrap().len(), 9);
    assert_eq!(code(&nehari(&["construct", "--d", "5"])), 2);
}
