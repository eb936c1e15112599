use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["j2kit"];
    full.extend_from_slice(args);
    let code = j2kit::cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut v = args.to_vec();
    v.push("--json");
    let (code, out, err) = run(&v);
    let json = serde_json::from_str(&out).unwrap_or_else(|e| panic!("not json ({e}): {out} / {err}"));
    (code, json)
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn chain_and_single(dir: &Path) -> (String, String) {
    let chain = serde_json::json!({
        "worlds": [0, 1],
        "r0": [[0, 1]],
        "r1": [],
        "root": 0
    });
    let single = serde_json::json!({
        "worlds": [0],
        "r0": [],
        "r1": [],
        "root": 0
    });
    (write(dir, "chain.json", &chain), write(dir, "single.json", &single))
}

#[test]
fn theorem_exits_zero_and_echoes_bounds() {
    let (code, json) = run_json(&["prove", "[0]p1 -> [0][0]p1"]);
    assert_eq!(code, 0);
    assert_eq!(json["verdict"], "theorem");
    assert!(json["bounds"].is_object());
}

#[test]
fn refuted_formula_ships_a_countermodel_that_model_check_confirms() {
    let dir = tempfile::tempdir().unwrap();
    let (code, json) = run_json(&["prove", "[1]p1 -> [0]p1"]);
    assert_eq!(code, 1);
    let cm = &json["countermodel"];
    let path = write(dir.path(), "cm.json", &cm["model"]);
    let point = cm["point"].to_string();
    let (code, json) = run_json(&["model-check", &path, "[1]p1 -> [0]p1", "--world", &point]);
    assert_eq!(code, 1, "{json}");
    assert_eq!(json["holds"], false);
}

#[test]
fn satisfiable_formula_ships_a_model() {
    let dir = tempfile::tempdir().unwrap();
    let (code, json) = run_json(&["sat", "<0>p1 & ~p1"]);
    assert_eq!(code, 0);
    let path = write(dir.path(), "m.json", &json["model"]["model"]);
    let point = json["model"]["point"].to_string();
    let (code, _) = run_json(&["model-check", &path, "<0>p1 & ~p1", "--world", &point]);
    assert_eq!(code, 0);
}

#[test]
fn admissible_but_not_derivable() {
    let (code, json) = run_json(&["admissible", "<0>T", "F"]);
    assert_eq!(code, 0);
    assert_eq!(json["admissible"], true);
    assert_eq!(json["derivable"], false);
}

#[test]
fn bisim_failure_yields_a_formula_separating_the_points() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = chain_and_single(dir.path());
    let (code, json) = run_json(&["bisim", "-n", "1", &a, &b]);
    assert_eq!(code, 1);
    assert_eq!(json["bisimilar"], false);
    assert!(json["mismatch"].is_object());
    let f = json["distinguishing_formula"].as_str().unwrap().to_string();
    assert_eq!(run(&["model-check", &a, &f]).0, 0);
    assert_eq!(run(&["model-check", &b, &f]).0, 1);
}

#[test]
fn bisim_of_identical_models_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = chain_and_single(dir.path());
    assert_eq!(run(&["bisim", "-n", "2", &a, &a]).0, 0);
}

#[test]
fn frame_validation() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = chain_and_single(dir.path());
    assert_eq!(run(&["validate-frame", &a]).0, 0);
    let bad = serde_json::json!({
        "worlds": [0, 1],
        "r0": [[0, 1], [1, 0]],
        "r1": [],
        "root": 0
    });
    let p = write(dir.path(), "bad.json", &bad);
    let (code, json) = run_json(&["validate-frame", &p]);
    assert_eq!(code, 1);
    assert!(!json["violations"].as_array().unwrap().is_empty());
}

#[test]
fn projectivity_verdicts() {
    let (code, json) = run_json(&["projective", "[0]p1 -> p1"]);
    assert_eq!(code, 0, "{json}");
    assert!(json["unifier"].is_object() || json["unifier"].is_array());
    let (code, json) = run_json(&["projective", "p1 | ~p1 & [0]F"]);
    assert!(code == 0 || code == 1, "{json}");
}

#[test]
fn types_of_one_variable() {
    let (code, json) = run_json(&["types", "-n", "1", "--vars", "p1"]);
    assert_eq!(code, 0);
    assert_eq!(json["count"], 32);
}

#[test]
fn error_codes() {
    assert_eq!(run(&["parse", "p1 &"]).0, 65);
    assert_eq!(run(&["frobnicate"]).0, 64);
    assert_eq!(run(&["validate-frame", "/nonexistent/model.json"]).0, 66);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn json_output_is_stable() {
    let a = run(&["prove", "[1]p1 -> p1", "--json"]);
    let b = run(&["prove", "[1]p1 -> p1", "--json"]);
    assert_eq!(a, b);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_j2kit");
    let ok = Command::new(bin).args(["prove", "p1 -> p1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let no = Command::new(bin).args(["prove", "p1"]).output().unwrap();
    assert_eq!(no.status.code(), Some(1));
    let parse = Command::new(bin).args(["prove", "(p1"]).output().unwrap();
    assert_eq!(parse.status.code(), Some(65));
    assert!(!parse.stderr.is_empty());
}
