use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn crossdecay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossdecay")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn sweeps_are_byte_identical_across_runs() {
    for cmd in ["sweep-phi", "sweep-time"] {
        let a = crossdecay(&[cmd, "--engine", "both", "--points", "9"]);
        let b = crossdecay(&[cmd, "--engine", "both", "--points", "9"]);
        assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout);
        let text = stdout(&a);
        assert!(!text.contains('\r'));
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        // header, then 3 r values × 9 points × 2 engines
        assert_eq!(data.len(), 1 + 3 * 9 * 2);
        assert!(data[1..].iter().all(|l| !l.contains("NaN") && !l.contains("inf")));
    }
}

#[test]
fn csv_headers_and_number_format() {
    let out = stdout(&crossdecay(&["sweep-phi", "--points", "3", "--r-list", "250"]));
    let lines: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "phi_rad,r_per_s,p_e,engine");
    assert_eq!(lines[1], "0.00000000000000e0,2.50000000000000e2,".to_string() + lines[1].split(',').nth(2).unwrap() + ",analytic");
    let value = lines[2].split(',').nth(2).unwrap();
    let mantissa = value.split('e').next().unwrap();
    assert_eq!(mantissa.len(), 16, "{value}");
    let out = stdout(&crossdecay(&["sweep-time", "--points", "3"]));
    assert!(out.lines().any(|l| l == "T_s,r_per_s,p_e_r,p_e_nr,D,engine"));
}

#[test]
fn metadata_regenerates_output() {
    let first = stdout(&crossdecay(&["sweep-time", "--points", "7", "--r-list", "100,800"]));
    let config = first.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap();
    let path = write_config("regen.json", config);
    let second = stdout(&crossdecay(&["sweep-time", "--config", path.to_str().unwrap()]));
    assert_eq!(first, second);
}

#[test]
fn timestamp_is_opt_in() {
    let plain = stdout(&crossdecay(&["sweep-phi", "--points", "2"]));
    assert!(!plain.contains("# timestamp:"));
    let stamped = stdout(&crossdecay(&["sweep-phi", "--points", "2", "--timestamp"]));
    assert!(stamped.lines().any(|l| l.starts_with("# timestamp:")));
}

#[test]
fn out_flag_writes_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("sweep.csv");
    let out = crossdecay(&["sweep-phi", "--points", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("phi_rad,r_per_s,p_e,engine"));
}

#[test]
fn usage_and_config_errors_exit_one() {
    let bad_field = write_config("bad_field.json", r#"{"decay": {"k": 1000, "rr": 3}}"#);
    let r_above_k = write_config("r_above_k.json", r#"{"decay": {"k": 10, "r": 20}}"#);
    let cases: Vec<Vec<&str>> = vec![
        vec!["frobnicate"],
        vec!["sweep-phi", "--points", "1"],
        vec!["sweep-phi", "--engine", "quantum"],
        vec!["sweep-time", "--r-list", "2000"],
        vec!["simulate", "--config", bad_field.to_str().unwrap()],
        vec!["simulate", "--config", r_above_k.to_str().unwrap()],
        vec!["simulate", "--config", "/nonexistent/config.json"],
    ];
    for args in cases {
        let out = crossdecay(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!stderr(&out).is_empty());
    }
    let out = crossdecay(&["simulate", "--config", bad_field.to_str().unwrap()]);
    assert!(stderr(&out).contains("rr"));
    assert_eq!(crossdecay(&["--help"]).status.code(), Some(0));
    assert_eq!(crossdecay(&["--version"]).status.code(), Some(0));
}

#[test]
fn simulate_examples() {
    let lossless = write_config("lossless.json", r#"{"decay": {"k": 0, "r": 0}}"#);
    let doc: Value = serde_json::from_slice(&crossdecay(&["simulate", "--config", lossless.to_str().unwrap()]).stdout).unwrap();
    assert!((doc["p_e"].as_f64().unwrap() - 1.0).abs() <= 1e-9);

    let dfs = write_config("dfs.json", r#"{"decay": {"k": 1000, "r": 1000, "gamma": 1.5707963267948966},
        "protocol": {"theta": 0.7853981633974483, "phi": 1.5707963267948966, "T": 0.0005}}"#);
    let out = crossdecay(&["simulate", "--config", dfs.to_str().unwrap(), "--engine", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["p_e"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    let gap = doc["p_e_simulated"].as_f64().unwrap() - doc["p_e_analytic"].as_f64().unwrap();
    assert!(gap.abs() < 1e-6);
    // overlap readout: three preparation segments and the window
    assert_eq!(doc["record"]["segments"].as_array().unwrap().len(), 4);

    let detuned = write_config("detuned.json", r#"{"decay": {"k": 1000, "r": 600},
        "protocol": {"experiment": "single_cavity_detuned", "T": 0.0005}}"#);
    let doc: Value = serde_json::from_slice(&crossdecay(&["simulate", "--config", detuned.to_str().unwrap()]).stdout).unwrap();
    assert!((doc["p_e"].as_f64().unwrap() - (-1.0f64).exp()).abs() <= 1e-6);
}

#[test]
fn lab_frame_flag_leaves_probability_unchanged() {
    let cfg = write_config("lab.json", r#"{"decay": {"k": 800, "r": 300, "gamma": 0.4},
        "protocol": {"readout": "explicit", "theta": 2.0, "phi": 0.7, "omega": 12566370.614359172}}"#);
    let p = |frame: &str| {
        let doc: Value = serde_json::from_slice(&crossdecay(&["simulate", "--config", cfg.to_str().unwrap(), "--frame", frame]).stdout).unwrap();
        doc["p_e"].as_f64().unwrap()
    };
    assert!((p("lab") - p("rotating")).abs() <= 1e-8);
}

#[test]
fn validate_profiles_and_fault_injection() {
    let out = crossdecay(&["validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["checks"].as_array().unwrap().len() >= 8);

    let out = crossdecay(&["validate", "--profile", "zero-dissipation"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], Value::Bool(true));

    let out = crossdecay(&["validate", "--inject-fault", "gamma-sign"]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let dfs = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "dfs_preservation").unwrap();
    assert_eq!(dfs["passed"], Value::Bool(false));
    assert!(stderr(&out).contains("dfs_preservation"));
}
