use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsym")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn straddle_forms_for_the_first_class() {
    let v = json(&["forms", "--class", "1,-2,-2", "--straddle", "-1"]);
    assert_eq!(v["value"], 6);
    let got: Vec<&str> = v["witnesses"]["straddling"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(got, ["[-2,-2,1]", "[-2,-6,-3]", "[-3,-6,-2]", "[1,0,-3]", "[1,2,-2]", "[1,4,1]"]);
}

#[test]
fn classical_translation() {
    let v = json(&["classical", "--matrix", "1,1,0,1"]);
    assert_eq!(v["value"]["phi"], "1");
    assert_eq!(v["value"]["psi"], "1");
}

#[test]
fn all_methods_on_the_golden_pair() {
    let v = json(&["hyp-psi", "--gamma", "2,1,1,1", "--sigma", "2,1,1,1", "--method", "all"]);
    assert_eq!(v["value"], -4);
    assert_eq!(v["witnesses"]["methods"]["first"], -4);
    assert_eq!(v["witnesses"]["methods"]["second"], -4);
    assert_eq!(v["witnesses"]["methods"]["oracle"], Value::Null);
    assert_eq!(v["witnesses"]["details"]["oracle"]["declined"], "coinciding geodesics");
}

#[test]
fn exact_output_is_byte_identical() {
    let args = ["hyp-psi", "--gamma", "3,2,1,1", "--sigma", "5,2,2,1", "--method", "all"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    let mut threaded = Command::new(env!("CARGO_BIN_EXE_rsym"));
    threaded.args(args).env("RSYM_THREADS", "1");
    assert_eq!(a, b);
    assert_eq!(a, threaded.output().unwrap().stdout);
    assert_eq!(a, run(&["--threads", "3", "hyp-psi", "--gamma", "3,2,1,1", "--sigma", "5,2,2,1", "--method", "all"]).stdout);
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["classical", "--matrix", "1,2,3,4"][..],
        &["classical", "--matrix", "1,x,0,1"],
        &["hyp-phi", "--gamma", "1,1,0,1", "--sigma", "2,1,1,1"],
        &["hyp-psi", "--gamma", "2,1,1,1", "--sigma", "1,1,0,1"],
        &["cf", "--value", "(1+sqrt(4))/2"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn selftest_passes() {
    assert_eq!(run(&["selftest"]).status.code(), Some(0));
}

#[test]
fn csv_table() {
    let out = run(&["analytic", "val", "--gamma", "2,1,1,1", "--max-m", "1", "--csv"]);
    let s = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "m,value,error");
    assert!(lines[1].starts_with("0,1.92484730"));
}
