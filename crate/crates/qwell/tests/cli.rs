//! End-to-end checks of the binary: determinism, report round-trips, and
//! exit-code semantics.

use qwell::certify::CertificationReport;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qwell"))
}

#[test]
fn csv_output_is_byte_deterministic() {
    let run = || {
        let out = bin()
            .args(["potential", "--k", "0.7", "--D", "3", "--alpha", "0.1"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("x,v\n"));
    assert_eq!(text.lines().count(), 2402);
    // '\n' endings only
    assert!(!text.contains('\r'));
}

#[test]
fn certify_report_round_trips() {
    let out = bin()
        .args(["certify", "--epsilon", "0.05", "--M", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report: CertificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.epsilon, 0.05);
    assert_eq!(report.m, 10.0);
    let again: CertificationReport =
        serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(report, again);
}

#[test]
fn strict_certify_passes_with_exit_zero() {
    let status = bin()
        .args(["certify", "--epsilon", "0.05", "--M", "10", "--strict"])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["potential", "--k", "-1"],
        vec!["potential", "--alpha", "1.5"],
        vec!["qscan", "--alphas", "0.1,2.0"],
        vec!["nonsense"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "args: {args:?}");
    }
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = std::env::temp_dir().join("qwell-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, r#"{"k": 0.7, "alpha": 0.1, "grid_n": 11}"#).unwrap();
    let from_config = bin()
        .args(["potential", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(from_config.status.success());
    let text = String::from_utf8(from_config.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 12);
    // the flag overrides the config value
    let flagged = bin()
        .args(["potential", "--config", cfg.to_str().unwrap(), "--grid-n", "5"])
        .output()
        .unwrap();
    let text = String::from_utf8(flagged.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    // matching run without config, all flags
    let explicit = bin()
        .args(["potential", "--k", "0.7", "--alpha", "0.1", "--grid-n", "11"])
        .output()
        .unwrap();
    assert_eq!(explicit.stdout, from_config.stdout);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = std::env::temp_dir().join("qwell-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("qscan.csv");
    let piped = bin()
        .args(["qscan", "--alphas", "0.25,0.75"])
        .output()
        .unwrap();
    let status = bin()
        .args(["qscan", "--alphas", "0.25,0.75", "--out", path.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(&path).unwrap(), piped.stdout);
}

#[test]
fn solve_emits_a_zero_ground_level() {
    let out = bin()
        .args(["solve", "--k", "1", "--D", "3", "--alpha", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["e0"].as_f64().unwrap().abs() < 1e-4);
    assert!(v["overlap_ground"].as_f64().unwrap() > 0.9999);
}
