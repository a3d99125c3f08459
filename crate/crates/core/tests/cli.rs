//! The command-line contract: payloads, exit codes, determinism, cache.

use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_p1curve")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("utf-8"))
}

fn json(args: &[&str]) -> Value {
    let (code, out) = run(args);
    assert_eq!(code, 0, "{args:?}");
    serde_json::from_str(&out).expect("json output")
}

#[test]
fn xd_examples() {
    assert_eq!(json(&["xd", "--d", "0"])["payload"]["text"], "1");
    let one = json(&["xd", "--d", "1"]);
    assert_eq!(one["payload"]["value"]["num"], serde_json::json!(["0", "1"]));
    assert_eq!(one["payload"]["value"]["den"], serde_json::json!(["1", "1"]));
    assert_eq!(json(&["xd", "--d", "5", "--form", "both"])["status"], "pass");
}

#[test]
fn gw_examples() {
    for (args, value) in [
        (["--g", "0", "--n", "1", "--d", "1", "--b", "0"], "1"),
        (["--g", "0", "--n", "3", "--d", "1", "--b", "0,0,0"], "1"),
        (["--g", "0", "--n", "1", "--d", "0", "--b", "-2"], "1"),
        (["--g", "1", "--n", "1", "--d", "0", "--b", "0"], "-1/24"),
    ] {
        let mut a = vec!["gw"];
        a.extend(args);
        assert_eq!(json(&a)["payload"]["value"], value, "{a:?}");
    }
    let v = json(&["gw", "--g", "0", "--n", "1", "--d", "0", "--b", "1"]);
    assert_eq!(v["payload"]["value"], "0");
    assert!(v["payload"]["warning"].is_string());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["verify", "--suite", "recursion", "--max", "0"]).0, 2);
    assert_eq!(run(&["verify", "--suite", "nonsense"]).0, 2);
    assert_eq!(run(&["wgn", "--g", "5", "--n", "5"]).0, 1);
    assert_eq!(run(&["gw", "--g", "0", "--n", "2", "--d", "1", "--b", "0"]).0, 2);
    assert_eq!(run(&["gw", "--g", "3", "--n", "1", "--d", "3", "--b", "10", "--budget", "6"]).0, 1);
    assert_eq!(run(&["wgn", "--g", "0", "--n", "3", "--format", "csv"]).0, 2);
}

#[test]
fn verify_suites() {
    let v = json(&["verify", "--suite", "ydzero", "--max", "12"]);
    assert_eq!(v["status"], "pass");
    let q = json(&["verify", "--suite", "qce", "--max", "10"]);
    let checks: Vec<&str> = q["payload"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert_eq!(checks, ["qce-recursion", "qce-conjugation", "qce-degree-graded-x"]);
    assert!(q["payload"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn smatrix_table() {
    let (code, out) = run(&["table", "--what", "smatrix", "--range", "0..4", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k,s11,s12,s21,s22");
    assert_eq!(lines[2], "1,0,0,1,0");
    assert_eq!(lines[3], "2,-1,0,0,1");
    assert_eq!(lines[4], "3,0,-2,1/2,0");
    assert_eq!(lines[5], "4,-5/4,0,0,1/4");
}

#[test]
fn wgn_expansion_is_weighted_invariant() {
    let v = json(&["wgn", "--g", "0", "--n", "3", "--emit", "expansion", "--order", "6"]);
    let coeffs = v["payload"]["coefficients"].as_array().unwrap();
    let get = |e: [i64; 3]| coeffs.iter().find(|c| c["exponents"] == serde_json::json!(e)).map(|c| c["value"].clone());
    // 1! 1! 3! <τ_0 τ_0 τ_2>_{0,3}^1 = 6.
    assert_eq!(get([0, 0, 2]).unwrap(), "6");
    assert_eq!(get([0, 0, 0]).unwrap(), "1");
    assert_eq!(get([0, 0, 1]), None);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["table", "--what", "invariants", "--range", "0..2", "--n", "2", "--budget", "6"]);
    let b = run(&["table", "--what", "invariants", "--range", "0..2", "--n", "2", "--budget", "6"]);
    assert_eq!(a, b);
}

#[test]
fn cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("p1curve-cache-{}", std::process::id()));
    let go = || {
        Command::new(env!("CARGO_BIN_EXE_p1curve"))
            .args(["wgn", "--g", "1", "--n", "1", "--at", "2"])
            .env("P1CURVE_CACHE_DIR", &dir)
            .output()
            .unwrap()
            .stdout
    };
    let first = go();
    assert!(dir.join("w_1_1.json").exists());
    assert_eq!(go(), first);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn check_commands_pass() {
    assert_eq!(json(&["psi-check"])["status"], "pass");
    assert_eq!(json(&["toda-check"])["status"], "pass");
    assert_eq!(json(&["fgn", "--g", "1", "--n", "1", "--order", "5"])["status"], "pass");
}
