use std::process::{Command, Output};

use serde_json::Value;

const SCHEMA: &str = include_str!("../schema/report.schema.json");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asep-lab"))
        .args(args)
        .env_remove("ASEP_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--json", "-"]);
    let out = run(&full);
    let doc = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.code().unwrap(), doc)
}

fn assert_valid(doc: &Value) {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn default_exact_suite_passes() {
    assert_eq!(
        code(&["verify", "all", "--Lmax", "4", "--Nmax", "2", "--mode", "exact"]),
        0
    );
}

#[test]
fn regime_violation_exits_one() {
    let args = [
        "verify", "duality", "--L", "3", "--N", "1", "--p", "2", "--q", "0.5", "--alpha", "1",
        "--gamma", "1",
    ];
    assert_eq!(code(&args), 1);
    let (_, doc) = json(&args);
    assert_eq!(doc["status"], "fail");
    assert_eq!(doc["checks"][0]["params"]["in_regime"], false);
}

#[test]
fn help_and_usage_errors() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("Usage"));

    let bad = run(&["verify", "all", "--no-such-flag"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("Usage"));

    assert_eq!(code(&["verify", "everything"]), 2);
    // Irrational τ cannot be exact.
    assert_eq!(code(&["verify", "duality", "--p", "2", "--q", "1"]), 2);
    assert_eq!(code(&["verify", "duality", "--gamma", "x/2"]), 2);
}

#[test]
fn unwritable_path_exits_two() {
    assert_eq!(
        code(&[
            "verify",
            "conventions",
            "--json",
            "/nonexistent-dir/report.json"
        ]),
        2
    );
}

#[test]
fn empty_grid() {
    let (status, doc) = json(&["verify", "all", "--Lmax", "0"]);
    assert_eq!(status, 0);
    assert_eq!(doc["checks"], Value::Array(vec![]));
    assert_eq!(doc["status"], "pass");
    assert_valid(&doc);
}

#[test]
fn default_run_validates_and_keeps_key_order() {
    let (status, doc) = json(&["verify", "all"]);
    assert_eq!(status, 0);
    assert_valid(&doc);
    // Value sorts keys, so look at the raw text.
    let text = String::from_utf8(run(&["verify", "all", "--json", "-"]).stdout).unwrap();
    let at = |key: &str| {
        text.find(&format!("\"{key}\":"))
            .unwrap_or_else(|| panic!("{key}"))
    };
    let top = ["version", "mode", "command", "grid", "checks", "status"].map(at);
    assert!(top.windows(2).all(|w| w[0] < w[1]), "{top:?}");
    let check = ["name", "params", "passed", "residual", "derived"].map(at);
    assert!(check.windows(2).all(|w| w[0] < w[1]), "{check:?}");
    let checks = doc["checks"].as_array().unwrap();
    let exact = checks.iter().filter(|c| c["params"]["mode"] == "exact");
    assert!(exact.clone().count() > 40);
    assert!(exact.into_iter().all(|c| c["residual"] == "0"));
}

#[test]
fn numeric_report_validates() {
    let (status, doc) = json(&[
        "verify", "all", "--mode", "numeric", "--Lmax", "3", "--tau", "3/2",
    ]);
    assert_eq!(status, 0);
    assert_valid(&doc);
    assert!(doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "semigroup.duality"));
    assert!(doc["checks"][0]["residual"].is_number());
}

#[test]
fn report_is_deterministic_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let p = path.to_str().unwrap();
        assert_eq!(code(&["verify", "symmetry", "--Lmax", "3", "--json", p]), 0);
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn printed_variants_fail() {
    let (status, doc) = json(&["verify", "symmetry", "--L", "2", "--N", "2", "--printed"]);
    assert_eq!(status, 1);
    let failing: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        failing,
        [
            "symmetry.shift_relation.printed",
            "symmetry.sn_explicit.printed"
        ]
    );
}

#[test]
fn negative_controls_detect_violations() {
    let (status, doc) = json(&[
        "verify",
        "all",
        "--Lmax",
        "3",
        "--Nmax",
        "1",
        "--negative-controls",
    ]);
    assert_eq!(status, 0);
    let controls = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("negative_control."))
        .count();
    assert_eq!(controls, 9);
}

#[test]
fn each_subcommand_passes() {
    for which in [
        "prop1",
        "lemma",
        "duality",
        "corollary",
        "symmetry",
        "examples",
        "conventions",
    ] {
        assert_eq!(code(&["verify", which, "--Lmax", "3"]), 0, "exact {which}");
        assert_eq!(
            code(&["verify", which, "--Lmax", "3", "--mode", "numeric", "--p", "2", "--q", "0.5"]),
            0,
            "numeric {which}"
        );
    }
    // The Hamiltonian form is stated for √(pq) = 1.
    for which in ["duality", "corollary", "symmetry"] {
        assert_eq!(
            code(&["verify", which, "--Lmax", "3", "--mode", "numeric", "--p", "3", "--q", "0.75"]),
            0,
            "{which}"
        );
    }
    assert_eq!(
        code(&["verify", "prop1", "--mode", "numeric", "--p", "3", "--q", "0.75"]),
        2
    );
}

#[test]
fn simulation_is_seeded() {
    let args = [
        "simulate",
        "duality-mc",
        "--L",
        "3",
        "--N",
        "2",
        "--t",
        "0.5",
        "--trajectories",
        "4000",
        "--seed",
        "9",
    ];
    let (status, a) = json(&args);
    assert_eq!(status, 0);
    assert_valid(&a);
    let (_, b) = json(&args);
    assert_eq!(a, b);
    assert_eq!(a["checks"][0]["params"]["seed"], 9);

    let from_env = Command::new(env!("CARGO_BIN_EXE_asep-lab"))
        .args(&args[..args.len() - 2])
        .args(["--json", "-"])
        .env("ASEP_LAB_SEED", "9")
        .output()
        .unwrap();
    let c: Value = serde_json::from_slice(&from_env.stdout).unwrap();
    assert_eq!(a, c);
}

#[test]
fn simulation_outside_regime_is_a_usage_error() {
    assert_eq!(
        code(&[
            "simulate",
            "duality-mc",
            "--p",
            "2",
            "--q",
            "0.5",
            "--alpha",
            "1",
            "--trajectories",
            "10"
        ]),
        2
    );
}

#[test]
fn schema_subcommand_prints_shipped_schema() {
    let out = run(&["report", "schema"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), SCHEMA);
}
