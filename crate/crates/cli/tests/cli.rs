use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wmit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn value_of(report: &Value, name: &str, route: &str) -> f64 {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name && r["route"] == route)
        .unwrap_or_else(|| panic!("no {name} via {route} in {report}"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn exponential_cumulative_entropy() {
    let out = wmit(&["measure", "--dist", "exponential:rate=1", "--quantity", "cumulative-entropy"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["schema"], 1);
    assert!((value_of(&r, "cumulative-entropy", "quadrature") - 0.644934).abs() < 1e-6);
    assert!((value_of(&r, "cumulative-entropy", "mean-of-mit") - 0.644934).abs() < 1e-6);
    assert!(r["results"][0]["error_estimate"].is_number());
    assert!(r["grid"].is_string());
    assert_eq!(r["tolerance"], 1e-4);
    assert!(r["seed"].is_u64());
}

#[test]
fn rhr_order_between_exponentials() {
    let out = wmit(&["order-check", "--kind", "rhr", "--x", "exponential:rate=2", "--y", "exponential:rate=1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["details"]["verdict"]["kind"], "holds");
    assert_eq!(value_of(&r, "holds", "grid"), 1.0);
}

#[test]
fn uniform_gce_of_order_three() {
    let out = wmit(&["measure", "--dist", "uniform:b=1", "--quantity", "gce", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert!((value_of(&r, "gce[n=3]", "quadrature") - 0.0625).abs() < 1e-10);
}

#[test]
fn reversed_order_fails_without_violation() {
    let out = wmit(&[
        "order-check",
        "--kind",
        "rhr",
        "--x",
        "exponential:rate=1",
        "--y",
        "exponential:rate=2",
        "--implications",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["details"]["verdict"]["kind"], "fails");
    assert!(r["details"]["verdict"]["witness"].is_object());
    assert_eq!(value_of(&r, "implication-violations", "grid"), 0.0);
}

#[test]
fn same_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = wmit(&[
            "simulate",
            "--model",
            "records",
            "--dist",
            "weibull:shape=2,scale=1",
            "--n",
            "2",
            "--samples",
            "5000",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(matches!(out.status.code(), Some(0) | Some(4)));
        std::fs::read(path).unwrap()
    };
    let a = run("a.json");
    let b = run("b.json");
    assert_eq!(a, b);
    let r: Value = serde_json::from_slice(&a).unwrap();
    assert!(r["config"]["output"].get("path").is_none());
}

#[test]
fn explicit_seed_is_recorded_and_changes_draws() {
    let run = |seed: &str| {
        json_of(&wmit(&[
            "simulate",
            "--model",
            "shock",
            "--dist",
            "exponential:rate=1",
            "--samples",
            "2000",
            "--t",
            "1",
            "--seed",
            seed,
        ]))
    };
    let a = run("7");
    let b = run("8");
    assert_eq!(a["seed"], 7);
    assert_ne!(value_of(&a, "lifetime-cdf", "monte-carlo"), value_of(&b, "lifetime-cdf", "monte-carlo"));
}

#[test]
fn invalid_parameter_names_the_field() {
    let out = wmit(&["measure", "--dist", "uniform:b=-1", "--quantity", "gce", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dists[0]"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_inputs_name_the_field() {
    let out = wmit(&["measure", "--dist", "uniform:b=1", "--quantity", "gce"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'n'"));

    let out = wmit(&["measure", "--dist", "uniform:b=1", "--quantity", "mit", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'tol'"));

    let out = wmit(&["measure", "--dist", "uniform:b=1", "--quantity", "left-spread", "--p", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'p'"));
}

#[test]
fn csv_has_one_row_per_scalar() {
    let out = wmit(&[
        "measure",
        "--dist",
        "exponential:rate=1",
        "--quantity",
        "wmit",
        "--weight",
        "half-square",
        "--t",
        "0.5",
        "--t",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["command", "name", "value", "route", "error_estimate", "at", "seed"]);
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][5], "1");
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn config_file_with_tree_specs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
            "command": "measure",
            "dist_specs": [{"family": "uniform", "params": {"b": 2}}],
            "weight_spec": {"kind": "power", "r": 2},
            "quantity": "variance",
            "output": {"format": "json"}
        }"#,
    );
    let out = wmit(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    // X² for X ~ U(0, 2): E X⁴ - (E X²)² = 16/5 - 16/9.
    let want = 16.0 / 5.0 - 16.0 / 9.0;
    assert!((value_of(&r, "variance", "quadrature") - want).abs() < 1e-8);
    assert!((value_of(&r, "variance", "mean-squared-wmit") - want).abs() < 1e-8);
    assert_eq!(r["weight"], "power(r=2)");
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"command": "measure", "distz": ["uniform:b=1"]}"#);
    let out = wmit(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'distz'"));
}

#[test]
fn divergent_measure_is_a_numerical_failure_with_partial_report() {
    // Fréchet with gamma = 0.5 has no mean.
    let out = wmit(&["measure", "--dist", "frechet:c=1,gamma=0.5", "--quantity", "variance"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    assert_eq!(r["status"], "numerical-failure");
    assert!(r["error"].is_string());
}

#[test]
fn iwmit_and_reconstruct_report() {
    let out = wmit(&["iwmit", "--dist", "weibull:shape=2,scale=1", "--weight", "power:r=2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(value_of(&r, "increasing", "grid"), 1.0);
    assert_eq!(r["details"]["classification"]["consistent"], true);

    let out = wmit(&["reconstruct", "--dist", "exponential:rate=1", "--t", "0.7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    let want = 1.0 - (-0.7f64).exp();
    assert!((value_of(&r, "reconstructed-cdf", "wmit-inversion") - want).abs() < 1e-6);
}
