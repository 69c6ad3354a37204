use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn rotnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotnorm")).args(args).env_remove("ROTNORM_SEED").output().unwrap()
}

fn file(name: &str, value: Value) -> String {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, value.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn torus_context() -> String {
    file(
        "torus.json",
        json!({"n": 3, "m": 1, "connected": true, "closed_or_open": "closed", "regularity": "smooth", "assumption_P": true}),
    )
}

#[test]
fn lattice_of_three_hopf_fibers() {
    let a = file("hopf3.json", json!({"m": 3, "generators": [[1, 1, 1]]}));
    let out = rotnorm(&["lattice", "--in", &a]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["rank"], 1);
    assert_eq!(v["k"], json!(["inf", "inf", "inf"]));
}

#[test]
fn symmetric_coset() {
    let a = file("two.json", json!({"m": 1, "generators": [[2]]}));
    let out = rotnorm(&["coset", "--lattice", &a, "--offset", "1"]);
    assert_eq!(stdout_json(&out), json!({"theta": "1", "points": ["-1", "1"]}));
}

#[test]
fn torus_knot_verdict_and_bounds() {
    let ctx = torus_context();
    let z = file("z.json", json!({"m": 1, "generators": [[1]]}));
    let v = stdout_json(&rotnorm(&["verdict", "--context", &ctx, "--lattice", &z]));
    assert_eq!(v["status"], "Bounded");
    assert!(v["justification"].as_array().unwrap().len() > 2);

    let b = stdout_json(&rotnorm(&["bounds", "--theta", "5/2", "--context", &ctx, "--lattice", &z]));
    let e = &b["entries"];
    assert_eq!(e["cl_f"]["lower"], "7/8");
    assert_eq!(e["clb_modG_f"]["upper"], "3");
    assert_eq!(e["cld"]["upper"], "7");
    assert_eq!(e["clbd"]["upper"], "13");
    assert_eq!(e["cld"]["lower"], "3/8");
}

#[test]
fn bad_input_exits_one() {
    let out = rotnorm(&["lattice", "--in", "/nonexistent/lattice.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["message"].is_string());

    let out = rotnorm(&["lattice", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inconsistent_ledger_exits_two() {
    let l = file(
        "bad-ledger.json",
        json!({"entries": {"cl_f": {"lower": "5", "rules": ["given"]}, "clb_f": {"upper": "3", "rules": ["given"]}}}),
    );
    let out = rotnorm(&["bounds", "--ledger", &l]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ledger_closure() {
    let l = file(
        "ledger.json",
        json!({"entries": {"clb_modG_f": {"upper": "7", "rules": ["given"]}, "clbd_G": {"upper": "10", "rules": ["given"]}}}),
    );
    let v = stdout_json(&rotnorm(&["bounds", "--ledger", &l]));
    assert_eq!(v["entries"]["clb_f"]["upper"], "17");
    assert_eq!(v["entries"]["zeta"]["upper"], "68");
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, seed: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_rotnorm"));
        cmd.args(["defect", "--trials", "50", "--seed", seed]).env_remove("ROTNORM_SEED");
        if let Some(e) = env {
            cmd.env("ROTNORM_SEED", e);
        }
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("9"), "1"), run(None, "9"));
    assert_ne!(run(None, "1"), run(None, "9"));
}

#[test]
fn catalog_lists_every_fixture() {
    let v = stdout_json(&rotnorm(&["catalog", "list"]));
    assert!(v.as_array().unwrap().len() >= 9);
    let out = rotnorm(&["catalog", "check"]);
    assert!(out.status.success());
}
