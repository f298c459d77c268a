use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_quadklein"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8"))
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, text) = run(args);
    (code, serde_json::from_str(&text).expect("JSON output"))
}

#[test]
fn field_report() {
    let (code, v) = run_json(&["field", "--d", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["disc"], 40);
    assert_eq!(v["h"], 2);
    assert_eq!(v["fundamental_unit"]["epsilon"], "3+s");
    assert_eq!(v["fundamental_unit"]["norm"], -1);
}

#[test]
fn domain_errors_exit_one() {
    let (code, v) = run_json(&["field", "--d", "12"]);
    assert_eq!(code, 1);
    assert!(v["error"].is_object() || v["error"].is_string());
    let (code, _) = run_json(&["embed-reduce", "--d", "10", "--matrix", r#"[[3,"4+s"],["4-s",3]]"#]);
    assert_eq!(code, 1);
}

#[test]
fn embed_check_and_cover() {
    let m = r#"[[3,"4+s"],["4-s",3]]"#;
    let (code, v) = run_json(&["embed-check", "--d", "10", "--n", "3", "--matrix", m]);
    assert_eq!(code, 0);
    assert_eq!(v["integral"], true);
    assert_eq!(v["conjugate_to_standard"], false);
    let (code, v) = run_json(&["embed-cover", "--d", "10", "--n", "3", "--matrix", m]);
    assert_eq!(code, 0);
    let mut s: Vec<String> = v["patches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["s"].as_str().unwrap().to_string())
        .collect();
    s.sort();
    assert_eq!(s, vec!["3", "4+s", "4-s"]);
}

#[test]
fn non_integral_matrix_is_reported() {
    let (code, v) = run_json(&["embed-check", "--d", "-5", "--n", "3", "--matrix", "[[1,1],[1,-1]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["integral"], false);
    assert!(v["first_nonintegral"].is_object());
}

#[test]
fn invariants_with_relation() {
    let (code, v) = run_json(&["invariants", "--d", "-5", "--n", "3", "--relation", "G1^3 - G2*G3"]);
    assert_eq!(code, 0);
    assert_eq!(v["relation_checks"][0]["holds"], true);
    assert_eq!(v["presentation"]["generators"].as_array().unwrap().len(), 3);
}

#[test]
fn density_csv_and_out_file() {
    let dir = std::env::temp_dir().join(format!("quadklein-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("census.csv");
    let (code, text) = run(&[
        "density",
        "--d",
        "10",
        "--delta",
        "5",
        "--bound",
        "2000",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(text.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.lines().count() >= 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn output_is_deterministic() {
    let a = run(&["classgroup", "--d", "-210", "--narrow"]);
    let b = run(&["classgroup", "--d", "-210", "--narrow"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
}
