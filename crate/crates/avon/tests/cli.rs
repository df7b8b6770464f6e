//! End-to-end checks of the command-line contract: exit codes, report
//! formats, and the documented eval/wf behaviors.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpora(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpora")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avon"))
        .args(args)
        .output()
        .expect("failed to run the binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn check_accepts_bocardo() {
    let out = run(&["check", corpora("bocardo.lp").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("17/17 steps verified"));
}

#[test]
fn check_rejects_broken_script_naming_the_step() {
    let out = run(&["check", corpora("bocardo-broken.lp").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("step 13"), "{err}");
    assert!(err.contains("cites step 12"), "{err}");
}

#[test]
fn check_reports_parse_errors_with_exit_2() {
    let out = run(&["check", corpora("no-such-file.lp").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_json_lines_report() {
    let out = run(&[
        "check",
        corpora("bocardo.lp").to_str().unwrap(),
        "--report",
        "json-lines",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17);
    for line in lines {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["verdict"], "ok");
        assert!(record["id"].is_number());
        assert!(record["schema"].is_string());
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = run(&["check", corpora("divides.lp").to_str().unwrap()]);
    let b = run(&["check", corpora("divides.lp").to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn eval_divides_in_state() {
    let out = run(&[
        "eval",
        "--model",
        corpora("nat6.lm").to_str().unwrap(),
        "--context",
        "x:N",
        "--state",
        "x=#2",
        "(|)(x,x)",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    assert_eq!(stdout(&out).trim(), "true");
}

#[test]
fn eval_membership_false() {
    let out = run(&[
        "eval",
        "--model",
        corpora("sets.lm").to_str().unwrap(),
        "(∈)(a,A)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "false");
}

#[test]
fn eval_set_builder_yields_truth_set() {
    let out = run(&[
        "eval",
        "--model",
        corpora("sets.lm").to_str().unwrap(),
        "{}(x:A,(∈)(x,B))",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "{true}");
}

#[test]
fn eval_rejects_state_outside_the_context() {
    let out = run(&[
        "eval",
        "--model",
        corpora("nat6.lm").to_str().unwrap(),
        "--context",
        "x:N",
        "--state",
        "x=#9",
        "(|)(x,x)",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wf_classifies_sentences() {
    let out = run(&[
        "wf",
        "--model",
        corpora("bocardo.lm").to_str().unwrap(),
        "--context",
        "x:A",
        "(∈)(x,A)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("operator-application"), "{text}");
    assert!(text.contains("sentence"), "{text}");
}

#[test]
fn wf_rejects_unbound_variable_with_exit_1() {
    let out = run(&["wf", "", "X"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn wf_rejects_russell_string_with_exit_2() {
    let out = run(&["wf", "{}((¬)((∈)(X,X)),X)"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("must assign a domain"), "{err}");
}

#[test]
fn roundtrip_subcommand_honors_seed() {
    let out = run(&["roundtrip", "--cases", "64", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("seed 7"));
    let out2 = Command::new(env!("CARGO_BIN_EXE_avon"))
        .args(["roundtrip", "--cases", "64"])
        .env("AVON_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(stdout(&out2).trim(), stdout(&out).trim());
}
