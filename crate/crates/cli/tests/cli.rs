use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_parseval-mpc"));
    c.env_remove("PARSEVAL_MPC_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("parseval-mpc-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn demo2_worked_example() {
    for params in ["2,7,11,13,79", "2,7,11,13"] {
        let out = run(&["demo2", "--prime", "101", "--a", "3", "--b", "5", "--force-params", params]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["command"], "demo2");
        assert_eq!(v["s1"], "38");
        assert_eq!(v["s2"], "78");
        assert_eq!(v["reconstructed"], "15");
        assert_eq!(v["pure"], true);
        assert_eq!(v["transcript"]["protocol"], "two-party-exact");
    }
}

#[test]
fn demo2_table_prints_outputs() {
    let out = run(&["demo2", "--a", "3", "--b", "5", "--force-params", "2,7,11,13,79", "--table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("s1             38"));
    assert!(text.contains("s2             78"));
    assert!(text.contains("reconstructed  15"));
}

#[test]
fn demo2_zero_secret_and_validation() {
    let out = run(&["demo2", "--a", "0", "--b", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reconstructed"], "0");
    assert_eq!(v["transcript"]["flags"][0], "zero-secret");
    assert_eq!(run(&["demo2", "--a", "200", "--b", "1", "--prime", "101"]).status.code(), Some(2));
    assert_eq!(run(&["demo2", "--a", "1", "--b", "1", "--prime", "100"]).status.code(), Some(2));
    assert_eq!(run(&["demo2", "--a", "1", "--b", "1", "--force-params", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["demo2", "--a", "1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn demo2_is_deterministic_per_seed() {
    let args = ["demo2", "--prime", "2147483647", "--a", "123456", "--b", "654321", "--seed", "9"];
    let (x, y) = (run(&args), run(&args));
    assert_eq!(x.stdout, y.stdout);
    let v = json(&x);
    assert_eq!(v["reconstructed"], v["expected"]);
    let other = run(&["demo2", "--prime", "2147483647", "--a", "123456", "--b", "654321", "--seed", "10"]);
    assert_ne!(x.stdout, other.stdout);
    let m = run(&["demo2", "--a", "4", "--b", "9", "--mode", "multiplicative"]);
    assert_eq!(m.status.code(), Some(0));
    assert_eq!(json(&m)["reconstructed"], "36");
}

#[test]
fn demo3_reports_residual() {
    let out = run(&["demo3", "--a", "1.5", "--b", "-2", "--c", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["expected"], -9.0);
    assert!(v["residual"].as_f64().unwrap().is_finite());
    assert_eq!(v["transcript"]["protocol"], "three-party-analytic");
}

#[test]
fn demo_n_products() {
    let out = run(&["demo-n", "--prime", "97", "--secrets", "2,3,4,5", "--nodes", "3", "--length", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reconstructed"], "23");
    assert_eq!(v["outputs"].as_array().unwrap().len(), 3);
    assert_eq!(run(&["demo-n", "--length", "5"]).status.code(), Some(2));
    assert_eq!(run(&["demo-n", "--nodes", "1"]).status.code(), Some(2));
    assert_eq!(run(&["demo-n", "--secrets", "2"]).status.code(), Some(2));
}

#[test]
fn ntt_check_exit_codes() {
    let ok = run(&["ntt-check", "--prime", "17", "--length", "8"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 10);
    assert_eq!(run(&["ntt-check", "--prime", "17", "--length", "5"]).status.code(), Some(2));
    assert_eq!(run(&["ntt-check", "--prime", "15", "--length", "2"]).status.code(), Some(2));
    assert_eq!(run(&["ntt-check", "--prime", "193", "--length", "64", "--trials", "10"]).status.code(), Some(0));
}

#[test]
fn verify_identities_default_report() {
    let out = run(&["verify-identities"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    let find = |id: &str| checks.iter().find(|c| c["identity"] == id).unwrap().clone();
    let law = find("convolution-law");
    assert_eq!(law["detail"]["matched"], "standard");
    assert_eq!(find("convolution-law-printed")["informational"], true);
    let sum = find("unweighted-sum");
    assert!((sum["detail"]["value"].as_f64().unwrap() - 2.532939).abs() < 1e-6);
    for c in checks {
        assert!(c["passed"] == true || c["informational"] == true, "{c}");
    }
}

#[test]
fn verify_identities_residuals_shrink_with_order() {
    let residual = |order: &str| {
        let v = json(&run(&["verify-identities", "--order", order, "--trials", "5"]));
        v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["identity"] == "parseval-two")
            .unwrap()["residual"]
            .as_f64()
            .unwrap()
    };
    let (low, high) = (residual("100"), residual("10000"));
    assert!(high < low / 50.0, "{high} vs {low}");
}

#[test]
fn security_stats_small_run() {
    let out = run(&["security-stats", "--trials", "20000", "--component", "a0,alpha0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["experiment"]["components"].as_array().unwrap().len(), 2);
    assert_eq!(v["negative_control"]["rejected"], true);
    assert!(v["negative_control"]["test"]["p_value"].as_f64().unwrap() < 1e-6);
    assert_eq!(run(&["security-stats", "--trials", "100"]).status.code(), Some(2));
    assert_eq!(run(&["security-stats", "--component", "tau1"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_under_out_dir() {
    let dir = scratch("simulate");
    let cfg = dir.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"protocol":"two-party-exact","prime":101,"seed":5,"trials":3,"secrets":[3,5]}"#,
    )
    .unwrap();
    let out = bin()
        .env("PARSEVAL_MPC_OUT_DIR", &dir)
        .args(["simulate", "--config", cfg.to_str().unwrap(), "--out", "reports/sim.json", "--table"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("reports/sim.json")).unwrap()).unwrap();
    assert_eq!(written["schema_version"], 1);
    let ts = written["transcripts"].as_array().unwrap();
    assert_eq!(ts.len(), 3);
    for t in ts {
        assert_eq!(t["reconstructed"]["field"], "15");
    }
    std::fs::write(&cfg, r#"{"protocol":"two-party-exact","trials":0,"secrets":[3,5]}"#).unwrap();
    assert_eq!(run(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}
