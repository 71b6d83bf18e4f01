//! Black-box tests of the `retrolab` binary: flags, exit codes, file
//! outputs, and reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn retrolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retrolab"))
        .args(args)
        .env_remove("RETROLAB_SEED")
        .output()
        .expect("binary runs")
}

fn retrolab_with_env(args: &[&str], seed_env: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retrolab"))
        .args(args)
        .env("RETROLAB_SEED", seed_env)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn predict_qm_at_preset_reports_two_thirds() {
    let dir = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "predict", "--model", "qm", "--alpha", "45", "--beta", "45", "--gamma", "-45",
        "--degrees", "--out", &out_arg(dir.path()),
    ]);
    let report = stdout_json(&output);
    let correlation = report["correlation"].as_f64().unwrap();
    assert!((correlation - 2.0 / 3.0).abs() < 1e-12);
    assert!(dir.path().join("manifest.json").exists());
    assert!(dir.path().join("predict_report.json").exists());
}

#[test]
fn predict_causal_at_preset_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "predict", "--model", "causal", "--alpha", "45", "--beta", "45", "--gamma", "-45",
        "--degrees", "--out", &out_arg(dir.path()),
    ]);
    let report = stdout_json(&output);
    assert!(report["correlation"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn predict_bbb_side1_singles_are_flat() {
    let dir = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "predict", "--model", "bbb", "--alpha", "10", "--beta", "20", "--gamma", "30",
        "--degrees", "--out", &out_arg(dir.path()),
    ]);
    let report = stdout_json(&output);
    assert_eq!(report["singles_side1"]["plus"].as_f64().unwrap(), 0.5);
    assert_eq!(report["singles_side1"]["minus"].as_f64().unwrap(), 0.5);
}

#[test]
fn degrees_flag_matches_radians_input() {
    let dir_deg = tempfile::tempdir().unwrap();
    let dir_rad = tempfile::tempdir().unwrap();
    let in_degrees = stdout_json(&retrolab(&[
        "predict", "--model", "qm", "--alpha", "45", "--beta", "0", "--gamma", "0",
        "--degrees", "--out", &out_arg(dir_deg.path()),
    ]));
    let quarter_pi = format!("{:.17}", std::f64::consts::FRAC_PI_4);
    let in_radians = stdout_json(&retrolab(&[
        "predict", "--model", "qm", "--alpha", &quarter_pi, "--beta", "0", "--gamma", "0",
        "--out", &out_arg(dir_rad.path()),
    ]));
    let a = in_degrees["phases"]["alpha"].as_f64().unwrap();
    let b = in_radians["phases"]["alpha"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-15);
    assert!((a - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    assert_eq!(in_degrees["correlation"], in_radians["correlation"]);
}

#[test]
fn predict_causal_subensemble_l_is_refused_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    for model in ["causal", "bbb"] {
        let output = retrolab(&[
            "predict", "--model", model, "--subensemble", "l", "--out", &out_arg(dir.path()),
        ]);
        assert_eq!(output.status.code(), Some(2));
        let stderr = String::from_utf8_lossy(&output.stderr);
        assert!(
            stderr.contains("not specified by paper"),
            "stderr: {stderr}"
        );
    }
}

#[test]
fn simulate_writes_five_files() {
    let dir = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "simulate", "--events", "5000", "--seed", "3", "--out", &out_arg(dir.path()),
    ]);
    assert!(output.status.success());
    for name in [
        "events.csv",
        "spectrum.csv",
        "coincidences.json",
        "estimate.json",
        "manifest.json",
    ] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let events = fs::read_to_string(dir.path().join("events.csv")).unwrap();
    let mut lines = events.lines();
    assert_eq!(lines.next().unwrap(), "index,sigma,omega,t1_s,t2_s,true_path");
    assert_eq!(lines.count(), 5000);
}

#[test]
fn malformed_config_exits_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    fs::write(&config_path, "{\"geometry\": {\"long_arm\": 1.3}}").unwrap();
    let output = retrolab(&[
        "simulate", "--config", config_path.to_str().unwrap(), "--out", &out_arg(dir.path()),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("missing field"), "stderr: {stderr}");
}

#[test]
fn invalid_config_value_exits_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "simulate", "--events", "0", "--out", &out_arg(dir.path()),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("n_events"), "stderr: {stderr}");
}

#[test]
fn identical_seed_gives_byte_identical_event_logs() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let output = retrolab(&[
            "simulate", "--events", "4000", "--seed", "99", "--out", &out_arg(dir.path()),
        ]);
        assert!(output.status.success());
    }
    let a = fs::read(dir_a.path().join("events.csv")).unwrap();
    let b = fs::read(dir_b.path().join("events.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn worker_count_does_not_change_event_log_bytes() {
    let mut logs = Vec::new();
    for workers in ["1", "3", "8"] {
        let dir = tempfile::tempdir().unwrap();
        let output = retrolab(&[
            "simulate", "--events", "4001", "--seed", "17", "--workers", workers,
            "--out", &out_arg(dir.path()),
        ]);
        assert!(output.status.success());
        logs.push(fs::read(dir.path().join("events.csv")).unwrap());
    }
    assert_eq!(logs[0], logs[1]);
    assert_eq!(logs[0], logs[2]);
}

#[test]
fn manifest_config_reproduces_the_run() {
    let dir_a = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "simulate", "--events", "2000", "--seed", "23", "--jitter", "5e-11",
        "--out", &out_arg(dir_a.path()),
    ]);
    assert!(output.status.success());
    let manifest_path = dir_a.path().join("manifest.json");
    let dir_b = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "simulate", "--config", manifest_path.to_str().unwrap(), "--out", &out_arg(dir_b.path()),
    ]);
    assert!(output.status.success());
    let a = fs::read(dir_a.path().join("events.csv")).unwrap();
    let b = fs::read(dir_b.path().join("events.csv")).unwrap();
    assert_eq!(a, b, "manifest config must reproduce the event log");
}

#[test]
fn unknown_flag_exits_2_and_help_exists_everywhere() {
    let output = retrolab(&["predict", "--model", "qm", "--no-such-flag"]);
    assert_eq!(output.status.code(), Some(2));
    for command in ["predict", "simulate", "spectrum", "discriminate", "verify"] {
        let output = retrolab(&[command, "--help"]);
        assert!(output.status.success(), "--help for {command}");
        let text = String::from_utf8_lossy(&output.stdout);
        assert!(text.contains("--out"), "{command} help mentions --out");
    }
}

#[test]
fn env_seed_is_default_and_flag_overrides() {
    let dir_env = tempfile::tempdir().unwrap();
    let dir_flag = tempfile::tempdir().unwrap();
    let dir_both = tempfile::tempdir().unwrap();
    let with_env = retrolab_with_env(
        &["simulate", "--events", "500", "--out", &out_arg(dir_env.path())],
        "555",
    );
    assert!(with_env.status.success());
    let with_flag = retrolab(&[
        "simulate", "--events", "500", "--seed", "555", "--out", &out_arg(dir_flag.path()),
    ]);
    assert!(with_flag.status.success());
    let flag_wins = retrolab_with_env(
        &[
            "simulate", "--events", "500", "--seed", "777", "--out", &out_arg(dir_both.path()),
        ],
        "555",
    );
    assert!(flag_wins.status.success());
    let env_log = fs::read(dir_env.path().join("events.csv")).unwrap();
    let flag_log = fs::read(dir_flag.path().join("events.csv")).unwrap();
    let both_log = fs::read(dir_both.path().join("events.csv")).unwrap();
    assert_eq!(env_log, flag_log, "env seed behaves like --seed");
    assert_ne!(env_log, both_log, "--seed overrides the env var");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir_both.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"].as_u64(), Some(777));
}

#[test]
fn spectrum_command_rebins_the_event_log() {
    let dir_sim = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "simulate", "--events", "3000", "--seed", "31", "--out", &out_arg(dir_sim.path()),
    ]);
    assert!(output.status.success());
    let dir_spec = tempfile::tempdir().unwrap();
    let events = dir_sim.path().join("events.csv");
    let output = retrolab(&[
        "spectrum", "--input", events.to_str().unwrap(), "--out", &out_arg(dir_spec.path()),
    ]);
    let report = stdout_json(&output);
    assert_eq!(report["total"].as_u64(), Some(3000));
    let from_simulate = fs::read(dir_sim.path().join("spectrum.csv")).unwrap();
    let from_spectrum = fs::read(dir_spec.path().join("spectrum.csv")).unwrap();
    assert_eq!(from_simulate, from_spectrum);
}

#[test]
fn discriminate_with_small_n_flags_insufficient_separation() {
    let dir = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "discriminate", "--events", "100", "--seed", "5", "--out", &out_arg(dir.path()),
    ]);
    let report = stdout_json(&output);
    assert_eq!(report["sufficient_separation"].as_bool(), Some(false));
    assert!(report["separation_sigma"].as_f64().unwrap() < 5.0);
}

#[test]
fn verify_passes_and_reports_properties() {
    let dir = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "verify", "--grid-points", "25", "--out", &out_arg(dir.path()),
    ]);
    let report = stdout_json(&output);
    assert_eq!(report["passed"].as_bool(), Some(true));
    let properties = report["properties"].as_array().unwrap();
    assert!(properties.len() > 15);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("PASS qm-closed-form-vs-amplitude-route"));
}

#[test]
fn reports_round_trip_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let output = retrolab(&[
        "predict", "--model", "qm", "--out", &out_arg(dir.path()),
    ]);
    let parsed = stdout_json(&output);
    let reserialized = serde_json::to_string(&parsed).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&reserialized).unwrap();
    assert_eq!(parsed, reparsed);
    let on_disk: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("predict_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(parsed, on_disk);
}

#[test]
fn every_command_writes_a_manifest() {
    let sim_dir = tempfile::tempdir().unwrap();
    assert!(retrolab(&[
        "simulate", "--events", "200", "--seed", "1", "--out", &out_arg(sim_dir.path()),
    ])
    .status
    .success());
    let events = sim_dir.path().join("events.csv");
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("predict", vec!["--model".into(), "qm".into()]),
        ("simulate", vec!["--events".into(), "200".into(), "--seed".into(), "1".into()]),
        (
            "spectrum",
            vec!["--input".into(), events.display().to_string()],
        ),
        (
            "discriminate",
            vec!["--events".into(), "500".into(), "--seed".into(), "2".into()],
        ),
        ("verify", vec!["--grid-points".into(), "5".into()]),
    ];
    for (command, extra) in cases {
        let dir = tempfile::tempdir().unwrap();
        let mut args: Vec<String> = vec![command.into()];
        args.extend(extra);
        args.push("--out".into());
        args.push(out_arg(dir.path()));
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let output = retrolab(&arg_refs);
        assert!(
            output.status.success(),
            "{command}: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        let manifest: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join("manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["command"].as_str(), Some(command));
        assert!(manifest["config"].is_object());
        assert!(manifest["duration_s"].as_f64().unwrap() >= 0.0);
        assert!(!manifest["outputs"].as_array().unwrap().is_empty());
    }
}
