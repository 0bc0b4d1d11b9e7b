//! End-to-end tests of the command-line interface: exit codes, diagnostics,
//! determinism and model snapshots.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vspair"))
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = bin().args(args).output().expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn eliminate_prints_quantifier_free_result() {
    let (stdout, _, code) = run(&["eliminate", "exists x . G(x) /\\ G(x + c)"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "Gl[1](c)\n");
}

#[test]
fn decide_encodes_verdict_in_exit_code() {
    let (stdout, _, code) = run(&["decide", "exists x . G(x)"]);
    assert_eq!((code, stdout.as_str()), (0, "true\n"));
    let (stdout, _, code) = run(&["decide", "exists x . ~(x = x)"]);
    assert_eq!((code, stdout.as_str()), (1, "false\n"));
}

#[test]
fn parse_errors_use_exit_two_with_caret() {
    let (_, stderr, code) = run(&["eliminate", "exists . G(x)"]);
    assert_eq!(code, 2);
    assert!(stderr.contains('^'), "{stderr}");
    let (_, _, code) = run(&["decide", "Gl[1, 2](x)"]);
    assert_eq!(code, 2); // dependent scalar tuple
}

#[test]
fn unbound_constant_is_exit_four() {
    let (_, stderr, code) = run(&["decide", "G(c)"]);
    assert_eq!(code, 4);
    assert!(stderr.contains('c'), "{stderr}");
}

#[test]
fn failing_suite_uses_exit_five() {
    let (stdout, _, code) = run(&["check", "--suite", "halfgraph", "--bounds", "samples=200"]);
    assert_eq!(code, 0, "{stdout}");
    let (_, stderr, code) = run(&["check", "--suite", "bogus"]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn config_file_switches_field() {
    let dir = std::env::temp_dir().join("vspair-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("nf.cfg");
    std::fs::write(&cfg_path, "field = a^2 - 2\nring = integers\nroot_index = 1\n").unwrap();
    let (stdout, _, code) = run(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "decide",
        "forall x . (Gl[1, a](x) -> G(f[1, a; 2](x)))",
    ]);
    assert_eq!((code, stdout.as_str()), (0, "true\n"));
    // the generator scalar is rejected over the plain rationals
    let (_, _, code) = run(&["decide", "exists x . Gl[1, a](x)"]);
    assert_eq!(code, 2);
}

#[test]
fn determinism_byte_identical() {
    let args = ["--json", "eliminate", "--trace", "exists x . G(x) /\\ Gl[2](x - d)"];
    let (a, _, _) = run(&args);
    let (b, _, _) = run(&args);
    assert_eq!(a, b);
    assert!(!a.is_empty());
}

#[test]
fn trace_json_round_trips() {
    let (stdout, _, code) = run(&["--json", "decide", "--trace", "forall x . (G(x) -> G(2*x))"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(doc["verdict"], serde_json::Value::Bool(true));
    assert!(doc["trace"]["output"].is_string());
    assert!(doc["trace"]["steps"].is_array());
}

#[test]
fn model_snapshot_binds_constants() {
    use vspair::config::EngineConfig;
    use vspair::model::{snapshot_to_json, ModelHandle};
    use vspair::scalar::FieldElem;

    let cfg = EngineConfig::rationals_integers();
    let mut m = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
    let h = m.fresh_g(1)[0];
    m.bind("c", m.elem(h).scale(&FieldElem::from_int(&cfg.field, 2)));
    let dir = std::env::temp_dir().join("vspair-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("model.json");
    std::fs::write(&path, serde_json::to_string_pretty(&snapshot_to_json(&m)).unwrap()).unwrap();
    // c = 2 h1 is in G and in 2G
    let (stdout, stderr, code) = run(&[
        "decide",
        "--model",
        path.to_str().unwrap(),
        "G(c) /\\ Gl[2](c)",
    ]);
    assert_eq!((code, stdout.as_str()), (0, "true\n"), "{stderr}");
    let (stdout, _, code) = run(&[
        "decide",
        "--model",
        path.to_str().unwrap(),
        "Gl[4](c)",
    ]);
    assert_eq!((code, stdout.as_str()), (1, "false\n"));
}

#[test]
fn check_emits_json_report() {
    let (stdout, _, code) = run(&["--json", "check", "--suite", "indep"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["suite"], "indep");
    assert_eq!(doc["failures"], 0);
}
