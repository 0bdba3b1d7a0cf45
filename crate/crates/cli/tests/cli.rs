use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn finsler(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stderr)
        .lines()
        .map(|l| serde_json::from_str(l).expect("stderr line is JSON"))
        .collect()
}

const ROUND: &str = r#"{"family": "round"}"#;
const BUMP: &str = r#"{"family": "busemann", "density": {"type": "bump", "center": [0.6, 0.0, 0.8], "amplitude": 0.5, "width": 0.2}}"#;
const BALL: &str = r#"{"dim": 3, "ball": {"center": [0, 0, 0], "radius": 1}}"#;

#[test]
fn zoll_round_passes() {
    let d = TempDir::new().unwrap();
    put(&d, "round.json", ROUND);
    let out = finsler(&["check", "zoll", "--field", "round.json"], d.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "pass");
    assert!((r["values"]["prime_length"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-10);
    assert!((r["values"]["volume"].as_f64().unwrap() - 4.0 * PI).abs() < 1e-8);
    let diag = stderr_lines(&out);
    assert!(diag.iter().any(|l| l["event"] == "report" && l["verdict"] == "pass"));
}

#[test]
fn chakerian_reuleaux_fails() {
    let d = TempDir::new().unwrap();
    let k = finsler_core::rigidity::reuleaux_tetrahedron(1.0, 3).unwrap();
    put(&d, "reuleaux.json", &k.to_json());
    put(&d, "ball.json", BALL);
    let out = finsler(&["check", "chakerian", "--body", "reuleaux.json", "--gauge", "ball.json"], d.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "fail");
}

#[test]
fn chakerian_translate_passes() {
    let d = TempDir::new().unwrap();
    put(&d, "k.json", r#"{"dim": 3, "ellipsoid": {"center": [0.3, -0.2, 0.1], "axes": [1.4, 0.7, 2.1]}}"#);
    put(&d, "b.json", r#"{"dim": 3, "ellipsoid": {"center": [0, 0, 0], "axes": [2, 1, 3]}}"#);
    let out = finsler(&["check", "chakerian", "--body", "k.json", "--gauge", "b.json"], d.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bump_volume_matches_prediction() {
    let d = TempDir::new().unwrap();
    put(&d, "bump.json", BUMP);
    let out = finsler(&["volume", "--field", "bump.json"], d.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let v = r["values"]["volume"].as_f64().unwrap();
    let ell = r["values"]["prime_length"].as_f64().unwrap();
    assert!((v - ell * ell / PI).abs() / v < 1e-2);
    assert!(v > 4.0 * PI);
}

#[test]
fn reports_are_byte_identical() {
    let d = TempDir::new().unwrap();
    put(&d, "round.json", ROUND);
    let args = ["check", "reversibility", "--field", "round.json", "--seed", "7", "--samples", "4", "--jobs", "3"];
    let a = finsler(&args, d.path());
    let b = finsler(&args, d.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut other = args.to_vec();
    other[4] = "--seed";
    other[5] = "8";
    let c = finsler(&other, d.path());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn out_file_and_csv_format() {
    let d = TempDir::new().unwrap();
    put(&d, "round.json", ROUND);
    let out = finsler(&["check", "santalo", "--field", "round.json", "--out", "r.json"], d.path());
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    assert!((r["values"]["lhs"].as_f64().unwrap() - 8.0 * PI * PI).abs() < 1e-6);
    let out = finsler(&["check", "santalo", "--field", "round.json", "--format", "csv"], d.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("section,key,value\n"));
    assert!(text.contains("meta,verdict,pass"));
}

#[test]
fn tol_override_rejudges() {
    let d = TempDir::new().unwrap();
    put(&d, "round.json", ROUND);
    let out = finsler(&["check", "crofton", "--field", "round.json", "--curve", "latitude:60", "--tol", "1e-9"], d.path());
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["tolerances"]["relative_mismatch"].as_f64(), Some(1e-9));
}

#[test]
fn geodesic_writes_csv() {
    let d = TempDir::new().unwrap();
    put(&d, "round.json", ROUND);
    let out = finsler(
        &["geodesic", "--field", "round.json", "--x0", "1,0,0", "--v0", "0,1,0", "--T", "1.5", "--out", "t.csv"],
        d.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(d.path().join("t.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,x3,v1,v2,v3,H"));
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((last[0] - 1.5).abs() < 1e-12);
    assert!((last[1] - 1.5f64.cos()).abs() < 1e-8 && (last[2] - 1.5f64.sin()).abs() < 1e-8);
}

#[test]
fn build_and_body_operations() {
    let d = TempDir::new().unwrap();
    put(&d, "cfg.json", r#"{"family": "randers", "b": [0.2, 0.1]}"#);
    assert_eq!(finsler(&["build", "--config", "cfg.json", "--out", "f.json"], d.path()).status.code(), Some(0));
    let f: Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(f["family"], "randers");

    put(&d, "tri.json", r#"{"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]]}"#);
    assert_eq!(finsler(&["body", "symmetral", "--in", "tri.json", "--out", "hex.json"], d.path()).status.code(), Some(0));
    let hex = finsler_core::ConvexBody::from_json(&std::fs::read_to_string(d.path().join("hex.json")).unwrap()).unwrap();
    assert!((hex.volume().unwrap() - 0.75).abs() < 1e-12);

    put(&d, "sq.json", r#"{"dim": 2, "vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}"#);
    assert_eq!(finsler(&["body", "polar", "--in", "sq.json", "--out", "p.json"], d.path()).status.code(), Some(0));
    let p = finsler_core::ConvexBody::from_json(&std::fs::read_to_string(d.path().join("p.json")).unwrap()).unwrap();
    assert!((p.volume().unwrap() - 2.0).abs() < 1e-12);

    put(&d, "ball.json", BALL);
    let out = finsler(&["body", "brightness", "--in", "ball.json", "--grid-level", "1"], d.path());
    let r = json(&out);
    let b = r["brightness"].as_array().unwrap();
    assert_eq!(b.len(), 42);
    assert!(b.iter().all(|v| (v.as_f64().unwrap() - PI).abs() < 1e-12));
}

#[test]
fn density_rigidity_pair() {
    let d = TempDir::new().unwrap();
    put(&d, "a.json", ROUND);
    put(&d, "b.json", r#"{"family": "busemann", "density": {"type": "constant", "value": 0.25}}"#);
    let out = finsler(&["check", "density-rigidity", "--field", "a.json", "--field", "b.json"], d.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let one = finsler(&["check", "density-rigidity", "--field", "a.json"], d.path());
    assert_eq!(one.status.code(), Some(2));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let d = TempDir::new().unwrap();
    put(&d, "bad.json", r#"{"family": "teapot"}"#);
    for args in [
        vec!["frobnicate"],
        vec!["check", "zoll", "--field", "bad.json"],
        vec!["check", "zoll", "--field", "missing.json"],
        vec!["volume", "--field", "bad.json", "--region", "donut"],
    ] {
        let out = finsler(&args, d.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let diag = stderr_lines(&out);
        assert!(diag.iter().any(|l| l["level"] == "error" && l["code"] == 2));
    }
}
