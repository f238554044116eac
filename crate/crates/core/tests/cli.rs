use std::path::Path;
use std::process::Command;

use nilsson::cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["nilsson"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn eval_multisum_apery_like() {
    let (code, out, _) = call(&["eval-multisum", "--term", "apery-like", "--n", "0..1"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["values"], serde_json::json!(["1", "11"]));
}

#[test]
fn gamma_series_at_one_half() {
    let (code, out, _) = call(&["gamma-series", "--gamma", "1/2", "--order", "2"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["coefficients"], serde_json::json!(["1", "-1/8", "1/128"]));
    let (_, out, _) = call(&["gamma-series", "--gamma", "-3/5", "--order", "1", "--symbolic"]);
    assert_eq!(json(&out)["polynomials_in_gamma"][1], serde_json::json!(["0", "-1/2", "1/2"]));
}

#[test]
fn exit_codes() {
    let (code, _, err) = call(&["--bogus"]);
    assert_eq!(code, 1);
    assert!(err.contains("Usage"));
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("analyze-recurrence"));
    let (code, _, err) = call(&["gamma-series", "--gamma", "x/2"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    let (code, _, err) = call(&["beta-integral", "--gamma", "5", "--n", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("0 < γ < n+1"));
    let (code, _, _) = call(&["unroll", "--builtin", "nope", "--n", "0..3"]);
    assert_eq!(code, 1);
    let (code, _, _) = call(&["diagnose", "--values", "/nonexistent/values.json"]);
    assert_eq!(code, 1);
}

#[test]
fn ill_conditioned_fit_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = call(&["unroll", "--builtin", "geometric", "--n", "0..80", "--out", &p(dir.path(), "v.json")]);
    assert_eq!(code, 0);
    std::fs::write(
        dir.path().join("m.json"),
        r#"{"lambdas": ["3", "3"], "monomials": [
            {"lambda": 0, "alpha": "0", "k": 0}, {"lambda": 1, "alpha": "0", "k": 0}]}"#,
    )
    .unwrap();
    let (code, _, err) = call(&[
        "fit", "--values", &p(dir.path(), "v.json"), "--model", &p(dir.path(), "m.json"),
        "--window", "20:60", "--precision", "128",
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("ill-conditioned"));
}

#[test]
fn analyze_then_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let e = p(dir.path(), "e.json");
    let v = p(dir.path(), "v.json");
    assert_eq!(call(&["analyze-recurrence", "--builtin", "geometric", "--out", &e]).0, 0);
    assert_eq!(call(&["unroll", "--builtin", "geometric", "--n", "0..200", "--out", &v]).0, 0);
    let (code, out, _) = call(&[
        "check", "--values", &v, "--expansion", &e, "--cuts", "0,0", "--window", "50:200", "--strict",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["pass"], Value::Bool(true));
    let analysis = json(&std::fs::read_to_string(&e).unwrap());
    assert_eq!(analysis["meta"]["stokes_known"], Value::Bool(false));
    assert_eq!(analysis["solutions"].as_array().unwrap().len(), 2);
}

#[test]
fn tet6j_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let v = p(dir.path(), "v.json");
    let m = p(dir.path(), "m.json");
    let e = p(dir.path(), "e.json");
    assert_eq!(call(&["eval-multisum", "--term", "tet6j", "--n", "0..400", "--out", &v]).0, 0);
    std::fs::write(
        &m,
        r#"{"minpoly": [2, 0, 1],
            "lambdas": [{"minpoly": [2,0,1], "coords": [["329","729"],["-460","729"]]},
                        {"minpoly": [2,0,1], "coords": [["329","729"],["460","729"]]}],
            "series": [{"lambda": 0, "alpha": "3/2", "K": 7}, {"lambda": 1, "alpha": "3/2", "K": 7}]}"#,
    )
    .unwrap();
    let (code, _, err) = call(&["fit", "--values", &v, "--model", &m, "--window", "150:300", "--out", &e]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = call(&[
        "check", "--values", &v, "--expansion", &e, "--cuts", "3/2,0;5/2,0", "--window", "300:400",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["pass"], Value::Bool(true), "{out}");
    let (code, out, _) = call(&["diagnose", "--values", &v, "--window", "100:300"]);
    assert_eq!(code, 0);
    let r = json(&out)["growth"]["r"].as_f64().unwrap();
    assert!((r - 1.0).abs() < 1e-2);
}

#[test]
fn outputs_are_deterministic() {
    let a = call(&["analyze-recurrence", "--builtin", "tet6j", "--order", "4"]);
    let b = call(&["analyze-recurrence", "--builtin", "tet6j", "--order", "4"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert!(!a.1.contains("timestamp"));
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_nilsson"))
        .args(["beta-integral", "--gamma", "1/2", "--n", "0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json(&String::from_utf8(out.stdout).unwrap());
    assert!(v["closed"].as_str().unwrap().starts_with("3.14159265358979"));
    let bad = Command::new(env!("CARGO_BIN_EXE_nilsson")).arg("fit").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
