use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modlie")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let out = run(&a);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("modlie-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn construct_reports_dimension_and_checks() {
    let (code, v) = report(&["construct", "H-omega2", "--p", "3", "--n1", "1", "--n2", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["dim"], 26);
    assert_eq!(v["results"]["simple"], true);
    assert_eq!(v["field"]["modulus"], serde_json::json!([0, 1]));
    let (code, v) = report(&["construct", "W1n", "--p", "2", "--n", "3", "--kind", "group"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["dim"], 8);
}

#[test]
fn exported_tables_verify() {
    let path = tmp("af_u.json");
    let p = path.to_str().unwrap();
    let out = run(&["construct", "AF", "--a", "0", "--b", "1", "--n", "2", "--p", "3", "--basis", "u", "--out", p]);
    assert!(out.status.success());
    let table: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table["dim"], 8);
    assert_eq!(table["labels"][0], "u_{0}");
    let (code, v) = report(&["verify", p, "--checks", "jacobi,simple,perfect"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn jacobi_failure_exits_one() {
    let path = tmp("bad_jacobi.json");
    let body = r#"{"p":3,"n":1,"modulus":[0,1],"dim":3,"labels":["a","b","c"],
        "table":[[0,1,[[2,"1"]]],[1,2,[[0,"1"]]],[0,2,[[0,"1"]]]]}"#;
    std::fs::write(&path, body).unwrap();
    let (code, v) = report(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["checks"][0]["pass"], false);
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(run(&["construct", "AF", "--a", "1", "--b", "1", "--n", "2", "--p", "3"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "H-omega2", "--p", "4", "--n1", "1", "--n2", "1"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "nonsense"]).status.code(), Some(2));
    let path = tmp("malformed.json");
    std::fs::write(&path, "{\"p\": 3,\n  \"n\": ]").unwrap();
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn loop_on_the_af_u_basis() {
    let (code, v) = report(&["loop", "--family", "AFS", "--a", "0", "--b", "1", "--n", "2", "--p", "3", "--depth", "40"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"][0]["name"], "maximal class");
    assert_eq!(v["results"]["centralizers"].as_array().unwrap().len(), 39);
}

#[test]
fn loop_thin_gradings() {
    let (code, v) = report(&["loop", "--family", "lemma", "--p", "3", "--n2", "1"]);
    assert_eq!(code, 0);
    let d = &v["results"]["diamonds"];
    assert_eq!(d[0]["degree"], 3);
    assert_eq!(d[0]["fake"], true);
    assert_eq!(d[1]["type"], "1");
    let (code, _) = report(&["loop", "--family", "thin", "--p", "3", "--n1", "1", "--n2", "2"]);
    assert_eq!(code, 0);
}

#[test]
fn cohomology_expectations() {
    let args = ["cohomology", "--family", "H-omega2", "--p", "3", "--n1", "1", "--n2", "2"];
    let (code, v) = report(&args);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["H2"], 3);
    let mut wrong = args.to_vec();
    wrong.extend(["--expect", "4"]);
    assert_eq!(report(&wrong).0, 1);
}

#[test]
fn iso_certificates() {
    let (code, v) = report(&["iso", "sigma", "--a", "0", "--b", "1", "--n", "2", "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["certificate"]["rank"], 3);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    let (code, v) = report(&["iso", "tau", "--p", "3", "--n2", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["certificate"]["field"], "F_3^2");
    let (code, _) = report(&["iso", "frobenius", "--a", "1", "--b", "2", "--n", "3", "--p", "2"]);
    assert_eq!(code, 0);
}

#[test]
fn grade_reports_dimensions() {
    let (code, v) = report(&["grade", "--p", "3", "--n1", "1", "--n2", "2", "--r", "-9", "--s", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["period"], 26);
    let (code, v) = report(&["grade", "--p", "3", "--n1", "1", "--n2", "1", "--lemma"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["period"], 6);
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let args = ["cohomology", "--family", "H-omega2", "--p", "5", "--n1", "1", "--n2", "1", "--json"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    let mut seq = args.to_vec();
    seq.extend(["--threads", "1"]);
    let c = run(&seq).stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
}
