use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cytower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cytower"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn dim_two_lists_eleven_weights() {
    let out = cytower(&["dim", "--n", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["dim"], "10");
    assert_eq!(v["weights"].as_array().unwrap().len(), 11);
    assert_eq!(v["weights"][10], "42");
}

#[test]
fn dim_zero_is_a_point() {
    let v = stdout_json(&cytower(&["dim", "--n", "0"]));
    assert_eq!(v["dim"], "0");
    assert_eq!(v["weights"], serde_json::json!(["2"]));
}

#[test]
fn dim_five_counts_without_weights() {
    let v = stdout_json(&cytower(&["dim", "--n", "5"]));
    assert_eq!(v["dim"], "123769377141");
    assert!(v["weights"].is_null());
}

#[test]
fn embed_reads_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("p.json");
    let output = dir.path().join("q.json");
    fs::write(&input, r#"{"n": 0, "coords": {"0": "1"}}"#).unwrap();
    let out = cytower(&["embed", "--in", input.to_str().unwrap(), "--out", output.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["coords"]["0,1"], "-1/3");
    assert_eq!(v["coords"]["0,0"], "2/27");
}

#[test]
fn embed_output_is_a_valid_input() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    fs::write(&a, r#"{"n": 1, "coords": {"0,1": "1", "0,0": "0"}}"#).unwrap();
    assert!(cytower(&["embed", "--in", a.to_str().unwrap(), "--out", b.to_str().unwrap()]).status.success());
    let v = stdout_json(&cytower(&["embed", "--in", b.to_str().unwrap()]));
    assert_eq!(v["n"], 3);
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, "not json").unwrap();
    assert_eq!(cytower(&["embed", "--in", p.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&p, r#"{"n": 1, "coords": {"0,9": "1"}}"#).unwrap();
    assert_eq!(cytower(&["embed", "--in", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cytower(&["embed", "--in", "/nonexistent/x.json"]).status.code(), Some(2));
}

#[test]
fn lct_of_the_e8_curve_singularity() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.txt");
    fs::write(&p, "1 : 2 0 0\n1 : 0 3 0\n1 : 0 0 7\n").unwrap();
    let v = stdout_json(&cytower(&["lct", "--in", p.to_str().unwrap()]));
    assert_eq!(v["lct"], "41/42");
    assert_eq!(v["c"], "42/41");
    assert_eq!(v["verified"], true);
    assert_eq!(v["classification"], "not torically log canonical");
}

#[test]
fn lct_at_a_shifted_base_point() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.txt");
    // (x - 1)^2 + y^3 expanded
    fs::write(&p, "1 : 2 0\n-2 : 1 0\n1 : 0 0\n1 : 0 3\n").unwrap();
    let v = stdout_json(&cytower(&["lct", "--in", p.to_str().unwrap(), "--base", "1,0"]));
    assert_eq!(v["lct"], "5/6");
}

#[test]
fn classify_accepts_points_and_families() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    fs::write(&p, r#"{"n": 0, "coords": {"0": "1"}}"#).unwrap();
    let image = cytower(&["embed", "--in", p.to_str().unwrap()]);
    fs::write(&p, &image.stdout).unwrap();
    let v = stdout_json(&cytower(&["classify", "--in", p.to_str().unwrap()]));
    let rows = v["places"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["vbar"] == "1/1" && r["lct"] == "0/1"));

    fs::write(&p, r#"{"n": 1, "coeffs": {"0": ["0", "0", "1"]}}"#).unwrap();
    let out = cytower(&["classify", "--in", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn h11_methods_agree_at_level_three() {
    let brute = stdout_json(&cytower(&["h11", "--n", "3", "--method", "brute"]));
    let fast = stdout_json(&cytower(&["h11", "--n", "3"]));
    assert_eq!(brute["h11"], "251");
    assert_eq!(fast["h11"], "251");
    assert_eq!(brute["nonzero_twisted"], 0);
}

#[test]
fn empty_config_gives_defaults_and_thread_count_is_irrelevant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, "").unwrap();
    let a = cytower(&["--config", cfg.to_str().unwrap(), "dim", "--n", "3"]);
    let b = cytower(&["--threads", "1", "dim", "--n", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    fs::write(&cfg, r#"{"format": "table"}"#).unwrap();
    let t = cytower(&["--config", cfg.to_str().unwrap(), "dim", "--n", "1"]);
    assert!(String::from_utf8_lossy(&t.stdout).contains("dim: 1"));
    fs::write(&cfg, r#"{"colour": "red"}"#).unwrap();
    assert_eq!(cytower(&["--config", cfg.to_str().unwrap(), "dim", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn verify_quick_passes_with_json_on_stdout() {
    let out = cytower(&["verify", "quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["overall"], "pass");
    let first = &v["checks"][0];
    for key in ["name", "expected", "computed", "status", "elapsed_ms", "provenance"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("overall: PASS"));
}
