use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnrp2")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_reports_the_quaternion_group() {
    let o = run(&["enumerate", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("order: 8"), "{out}");
    assert!(out.contains("element orders: 1:1 2:1 4:6"), "{out}");
}

#[test]
fn enumerate_overflow_is_not_an_error() {
    let o = run(&["enumerate", "--n", "3", "--max-cosets", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("OVERFLOW"));
}

#[test]
fn abelianize_prints_invariant_factors() {
    let o = run(&["abelianize", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("invariant factors: 2 2 2"));
}

#[test]
fn output_is_byte_stable() {
    for args in [&["present", "--n", "3"][..], &["obstruct", "--n", "4"], &["prove", "--n", "2", "--supplementary"]] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn obstruct_exit_codes_encode_the_verdict() {
    assert_eq!(run(&["obstruct", "--n", "2"]).status.code(), Some(10));
    assert_eq!(run(&["obstruct", "--n", "3"]).status.code(), Some(20));
    assert_eq!(run(&["obstruct", "--n", "4", "--mode", "paper-subset"]).status.code(), Some(20));
    assert_eq!(run(&["obstruct", "--n", "2", "--m", "2"]).status.code(), Some(0));
    assert_eq!(run(&["obstruct", "--n", "3", "--m", "3"]).status.code(), Some(20));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["obstruct", "--n", "9"]).status.code(), Some(2));
    assert_eq!(run(&["obstruct", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["normal-form", "--n", "4", "--word", "rho[6]"]).status.code(), Some(2));
    assert_eq!(run(&["normal-form", "--n", "4", "--word", "rho[1"]).status.code(), Some(2));
    assert_eq!(run(&["act", "--n", "3", "--gen", "A[1]", "--word", "rho[4]"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn act_and_normal_form() {
    let o = run(&["act", "--n", "3", "--gen", "rho[3]", "--word", "rho[4]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rho[4]^-1 . A[1] . A[2]"), "{}", stdout(&o));

    let o = run(&["--format", "json", "normal-form", "--n", "4", "--word", "rho[5]^2 . A[1]"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m0"], "2");
    assert_eq!(v["v"], serde_json::json!(["1", "0", "0"]));
}

#[test]
fn verify_passes_and_prove_reports_failures() {
    assert_eq!(run(&["verify", "--n", "4"]).status.code(), Some(0));
    let o = run(&["prove", "--n", "2", "--supplementary"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("apply R"));
    let o = run(&["prove", "--n", "2", "--lhs", "rho[1]", "--rhs", "rho[2]", "--max-depth", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not found within depth 2"));
}

#[test]
fn json_obstruction_and_report_file() {
    let path = std::env::temp_dir().join(format!("pnrp2-report-{}.json", std::process::id()));
    let o = run(&["--format", "json", "obstruct", "--n", "3", "--report", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(20));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["verdict"], "UNSAT");
    assert_eq!(summary["branches"], 4);

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    let branches = report["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 4);
    for b in branches {
        assert_eq!(b["outcome"], "UNSAT");
        assert_eq!(b["certificate"]["verified"], true);
        assert_eq!(b["cites_surface_parity"], true);
    }
}
