use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn gsd3() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gsd3"))
}

fn run(args: &[&str]) -> Output {
    gsd3().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn named(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let out = run(&["state", name, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    path
}

fn report(dir: &Path, input: &Path) -> (i32, Value) {
    let path = dir.join("report.json");
    let out = run(&["decompose", "--in", input.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    (code(&out), serde_json::from_str(&text).unwrap_or(Value::Null))
}

#[test]
fn decompose_w() {
    let dir = tempfile::tempdir().unwrap();
    let (c, r) = report(dir.path(), &named(dir.path(), "w"));
    assert_eq!(c, 0);
    assert!((r["gsd"]["lambda0"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(r["verdicts"]["overall"], Value::Bool(true));
    assert_eq!(r["stationary_points"].as_array().unwrap().len(), 4);
    assert!(r["literal"].is_null());
    assert!(r["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn decompose_psi_contr_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (c, r) = report(dir.path(), &named(dir.path(), "psi_contr"));
    assert_eq!(c, 3);
    assert_eq!(r["literal"]["verdicts"]["global_max_ok"], Value::Bool(false));
    assert_eq!(r["verdicts"]["overall"], Value::Bool(true));
    let l0 = r["gsd"]["lambda0"].as_f64().unwrap();
    assert!(l0 * l0 >= 36.0 / 55.0 - 1e-12);
}

#[test]
fn malformed_and_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = dir.path().join("t.json");
    std::fs::write(&truncated, r#"{"amplitudes": [[1, 0], [0,"#).unwrap();
    let out = run(&["decompose", "--in", truncated.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let bad_field = dir.path().join("b.json");
    std::fs::write(&bad_field, r#"{"amplitudes": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,true]]}"#).unwrap();
    let out = run(&["decompose", "--in", bad_field.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("amplitudes[7][1]"));

    let out = run(&["decompose", "--in", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn text_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = named(dir.path(), "psi_contr");
    let (_, r) = report(dir.path(), &input);
    let text = stdout(&run(&["decompose", "--in", input.to_str().unwrap(), "--format", "text"]));
    for key in ["lambda0", "lambda1", "lambda2", "lambda3"] {
        let v = r["gsd"][key].as_f64().unwrap();
        let line = text.lines().find(|l| l.trim_start().starts_with(&format!("{key} ="))).unwrap();
        let shown: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
        assert_eq!(shown, v, "{key}");
    }
}

#[test]
fn verify_examples() {
    assert_eq!(code(&run(&["verify", "--coeffs", "2/3", "1/3", "1/3", "1/3", "0", "0.4714"])), 0);
    assert_eq!(code(&run(&["verify", "--coeffs", "sqrt(1/2)", "0", "0", "0", "sqrt(1/2)", "0"])), 0);
    let out = run(&["verify", "--coeffs", "0.5", "0.5", "0.1", "0.1", "0.5", "0.5", "--renormalize"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).lines().any(|l| l.starts_with("FAIL") && l.contains("inequality")));
    assert_eq!(code(&run(&["verify", "--coeffs", "0.5", "0.5", "0.1", "0.1", "0.5", "0.5"])), 2);
    assert_eq!(code(&run(&["verify", "--coeffs", "0.8", "-0.6", "0", "0", "0", "0"])), 3);
}

#[test]
fn wfamily_examples() {
    let out = run(&["wfamily", "--a", "0.57735", "--b", "0.57735", "--c", "0.57735", "--renormalize"]);
    assert_eq!(code(&out), 0);
    let s = stdout(&out);
    assert!(s.contains("rule 4"));
    assert!(s.lines().any(|l| l.starts_with("lambda0 = 0.66666666666666")));

    let out = run(&["wfamily", "--a", "0.8", "--b", "sqrt(0.27)", "--c", "0.3"]);
    assert!(stdout(&out).contains("rule 1") && stdout(&out).contains("lambda0 = 0.8"));

    let out = run(&["wfamily", "--a", "0.70711", "--b", "0.5", "--c", "0.5", "--renormalize", "--boundary-tol", "1e-4"]);
    assert!(stdout(&out).contains("boundary"));

    assert_eq!(code(&run(&["wfamily", "--a", "0", "--b", "0.6", "--c", "0.8"])), 2);
    assert_eq!(code(&run(&["wfamily", "--a", "0.57735", "--b", "0.57735", "--c", "0.57735"])), 2);
}

#[test]
fn scan_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ndjson");
    let b = dir.path().join("b.ndjson");
    let out = run(&["scan", "--n", "10", "--seed", "7", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("violations    0"));
    let out = gsd3()
        .env("GSD3_THREADS", "1")
        .args(["scan", "--n", "10", "--seed", "7", "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert_eq!(String::from_utf8(x).unwrap().lines().count(), 10);
}

#[test]
fn oracle_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["oracle", "--in", named(dir.path(), "psi_contr").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("discrepancy"));
    let out = run(&["oracle", "--in", named(dir.path(), "ghz").to_str().unwrap(), "--n-theta", "16", "--n-phi", "16"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("reduced bound")).count(), 3);
    let out = run(&["oracle", "--in", named(dir.path(), "w").to_str().unwrap(), "--n-theta", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_state_name() {
    assert_eq!(code(&run(&["state", "bell"])), 2);
}
