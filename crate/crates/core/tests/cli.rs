use std::path::PathBuf;

use hydiag::cli::run;
use hydiag::diagnoser::DiagnoserAutomaton;
use hydiag::estimator::EstimatorFile;
use hydiag::QuotientModel;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("hydiag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_string_lossy().into_owned()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hydiag_with_input(args: &[&str], input: &str) -> Out {
    let mut argv = vec!["hydiag"];
    argv.extend_from_slice(args);
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = run(argv, &mut input.as_bytes(), &mut stdout, &mut stderr);
    Out { code, stdout: String::from_utf8(stdout).unwrap(), stderr: String::from_utf8(stderr).unwrap() }
}

fn hydiag(args: &[&str]) -> Out {
    hydiag_with_input(args, "")
}

#[test]
fn check_q1_is_diagnosable() {
    let out = hydiag(&["check", &fixture("q1.quot.json")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("diagnosable\n"));
}

#[test]
fn check_q2_prints_lasso() {
    let out = hydiag(&["check", &fixture("q2.quot.json")]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.contains("prefix: o0 tick o1\ncycle: tick o0 tick o1"), "{}", out.stdout);
}

#[test]
fn check_json_verdict() {
    let out = hydiag(&["check", "--format", "json", &fixture("q2.quot.json")]);
    assert_eq!(out.code, 2);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["diagnosable"], false);
    assert_eq!(v["witness"]["cycle"], "tick o0 tick o1");
}

#[test]
fn validate_bad_d1_lists_rule() {
    let out = hydiag(&["validate", &fixture("bad-d1.quot.json")]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.lines().any(|l| l.starts_with("D1 ")), "{}", out.stdout);

    let out = hydiag(&["--format", "json", "validate", &fixture("bad-d1.quot.json")]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["ok"], false);
    assert_eq!(v["violations"][0]["rule"], "D1");
}

#[test]
fn check_refuses_invalid_model() {
    let out = hydiag(&["check", &fixture("bad-d1.quot.json")]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("D1"));
}

#[test]
fn non_progressive_model_exits_3() {
    let path = scratch("stuck.quot.json");
    let m = hydiag::model::ModelBuilder::new()
        .class("n", false, true, 0)
        .class("f", true, false, 0)
        .action("tick", hydiag::ActionKind::External)
        .action("f", hydiag::ActionKind::Fault)
        .edge("n", "f", "f")
        .edge("n", "tick", "n")
        .build()
        .unwrap();
    std::fs::write(&path, m.to_json()).unwrap();
    let out = hydiag(&["check", &path]);
    assert_eq!(out.code, 3, "{}", out.stdout);
}

#[test]
fn estimator_export_round_trips() {
    let path = scratch("q2.est.json");
    let out = hydiag(&["estimator", &fixture("q2.quot.json"), "-o", &path]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let file: EstimatorFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!file.states.is_empty());
    assert_eq!(file.initials.len(), 1);
}

#[test]
fn regions_output_is_a_quotient() {
    let path = scratch("ta1.quot.json");
    let out = hydiag(&["regions", &fixture("ta1.ta.json"), "-o", &path]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("6 classes (bound 16)"));
    let m = QuotientModel::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m.num_classes(), 6);
    assert_eq!(m.class_name(hydiag::ClassId(1)), "ok(0<x<1)");
}

#[test]
fn regions_cap_exits_5() {
    let out = hydiag(&["--max-classes", "5", "regions", &fixture("ta1.ta.json")]);
    assert_eq!(out.code, 5);
    assert!(out.stderr.contains("5 classes"));
}

#[test]
fn ta_input_is_accepted_everywhere() {
    assert_eq!(hydiag(&["validate", "--ta", &fixture("ta1.ta.json")]).code, 0);
    assert_eq!(hydiag(&["check", &fixture("ta1.ta.json")]).code, 0);
}

#[test]
fn malformed_ta_reports_position() {
    let path = scratch("broken.ta.json");
    std::fs::write(&path, "{\n  \"locations\": [\n").unwrap();
    let out = hydiag(&["regions", &path]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
}

#[test]
fn synthesize_and_run() {
    let path = scratch("q1.diag.json");
    let out = hydiag(&["synthesize", &fixture("q1.quot.json"), "-o", &path]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let diag = DiagnoserAutomaton::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(diag.num_states() > 0);

    let out = hydiag_with_input(&["run", &path], "init 0\ntick 1\n");
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 2);
    assert!(out.stdout.lines().all(|l| l.starts_with("yes ") || l.starts_with("no ")));

    let out = hydiag_with_input(&["--format", "json", "run", &path], "init 0\n");
    let v: serde_json::Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert_eq!(v["answer"], "no");
}

#[test]
fn run_reports_inconsistency() {
    let path = scratch("q1-inconsistent.diag.json");
    assert_eq!(hydiag(&["synthesize", &fixture("q1.quot.json"), "-o", &path]).code, 0);
    let out = hydiag_with_input(&["run", &path], "init 7\n");
    assert_eq!(out.code, 4);
    let out = hydiag_with_input(&["run", &path], "tick 0\n");
    assert_eq!(out.code, 1);
    let out = hydiag_with_input(&["run", &path], "init 0\nwhat\n");
    assert_eq!(out.code, 1);
}

#[test]
fn synthesize_refuses_undiagnosable() {
    let out = hydiag(&["synthesize", &fixture("q2.quot.json"), "-o", &scratch("q2.diag.json")]);
    assert_eq!(out.code, 2);
}

#[test]
fn oracle_agrees_on_fixtures() {
    assert_eq!(hydiag(&["oracle", &fixture("q1.quot.json")]).code, 0);
    let out = hydiag(&["oracle", &fixture("q2.quot.json"), "--depth", "2"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.contains("o0 tick o1 : {n1,f1}"), "{}", out.stdout);
    let out = hydiag(&["--max-classes", "2", "oracle", &fixture("q2.quot.json"), "--depth", "3"]);
    assert_eq!(out.code, 5);
}

#[test]
fn fuzz_summary() {
    let out = hydiag(&["fuzz", "--models", "50", "--seed", "4"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "tested: 50\nagreements: 50\n");
    let out = hydiag(&["--format", "json", "fuzz", "--models", "3", "--seed", "4", "--ta"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["agreements"], 3);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(hydiag(&["frobnicate"]).code, 1);
    assert_eq!(hydiag(&["check"]).code, 1);
    assert_eq!(hydiag(&["check", "/nonexistent.quot.json"]).code, 1);
    assert_eq!(hydiag(&["--help"]).code, 0);
}

#[test]
fn binary_exit_codes() {
    let status = |args: &[&str]| {
        std::process::Command::new(env!("CARGO_BIN_EXE_hydiag")).args(args).output().unwrap().status.code()
    };
    assert_eq!(status(&["check", &fixture("q1.quot.json")]), Some(0));
    assert_eq!(status(&["check", &fixture("q2.quot.json")]), Some(2));
    assert_eq!(status(&["validate", &fixture("bad-d1.quot.json")]), Some(1));
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_hydiag"))
        .args(["regions", &fixture("ta1.ta.json")])
        .env("HYDIAG_MAX_CLASSES", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}
