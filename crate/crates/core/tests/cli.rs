use std::process::{Command, Output};

fn fockbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockbell")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    fockbell(args).status.code().unwrap()
}

#[test]
fn successful_runs_exit_zero() {
    let out = fockbell(&["bchsh", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("q_max"));
    assert_eq!(code(&["ghz", "--n", "9", "--expect-violation"]), 0);
    assert_eq!(code(&["hardy", "--n", "6", "--expect-violation", "--format", "tree"]), 0);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&["bchsh", "--no-such-flag"]), 2);
    assert_eq!(code(&["ghz", "--n", "4"]), 2);
    assert_eq!(code(&["dist", "--zeta", "1", "--scan-zeta", "0:1:4"]), 2);
    assert_eq!(code(&["dist", "--n-alpha", "1", "--n-beta", "1", "--expect-violation"]), 2);
}

#[test]
fn refused_work_exits_three() {
    let out = fockbell(&["dist", "--n-alpha", "20", "--n-beta", "20", "--max-outcomes", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn wrong_expectation_exits_four() {
    assert_eq!(code(&["ghz", "--n", "6", "--expect-violation"]), 4);
    assert_eq!(code(&["hardy", "--n", "4", "--expect-violation"]), 4);
    assert_eq!(code(&["hardy", "--n", "6", "--expect-violation", "false"]), 4);
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let args = [
        "dist", "--n-alpha", "2", "--n-beta", "2", "--scan-zeta", "0:pi:5", "--theta", "0.2",
        "--samples", "1000", "--seed", "17",
    ];
    let a = fockbell(&args);
    let b = fockbell(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "scenario = \"ghz\"\nn = [6]\nexpect-violation = true\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&["--config", p]), 4);
    assert_eq!(code(&["--config", p, "--n", "9"]), 0);
}

#[test]
fn output_file_and_tree_echo_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = fockbell(&["ghz", "--n", "3", "--format", "tree", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let tree: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(tree["resolved"]["certificate_tolerance"], serde_json::json!(1e-9));
    assert_eq!(tree["config"]["max_outcomes"], serde_json::json!(10_000_000));
    assert_eq!(tree["verdict"], serde_json::Value::Bool(true));
}
