use std::path::Path;
use std::process::{Command, Output};

use srfpll::scenario::{preset, FeedForward, TRACE_HEADER};

fn srfpll(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srfpll")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn tune_prints_gains() {
    let o = srfpll(&["tune", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["kp"].as_f64().unwrap() - 122.474_487).abs() < 1e-5);
    assert!((v["ki"].as_f64().unwrap() - 306.186_218).abs() < 1e-5);
    assert!((v["phi_m_deg"].as_f64().unwrap() - 87.1358).abs() < 1e-3);
}

#[test]
fn tune_rejects_alpha_one() {
    let o = srfpll(&["tune", "--alpha", "1", "--error-json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"], "config");
}

#[test]
fn bode_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bode.csv");
    let o = srfpll(&["bode", "--points", "50", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("omega,mag_db,phase_deg"));
    assert_eq!(lines.count(), 50);
}

#[test]
fn simulate_preset_writes_trace_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = srfpll(&["simulate", "--preset", "ramp-startup", "--ff", "off", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some(TRACE_HEADER));
    assert_eq!(trace.lines().count(), 40_001);
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(m[0]["scenario"], "ramp-startup-100/ff-off");
    assert_eq!(m[0]["K"], 4000);
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(dir.path().join("metrics.json")).unwrap()
    );
}

#[test]
fn simulate_config_file_with_seed_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        preset("load-step-150", FeedForward::Estimated)
            .unwrap()
            .to_toml_string(),
    )
    .unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = srfpll(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        (
            std::fs::read(out.join("trace.csv")).unwrap(),
            std::fs::read(out.join("metrics.json")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn raw_metrics_flag_switches_mode() {
    let dir = tempfile::tempdir().unwrap();
    let o = srfpll(&[
        "simulate",
        "--preset",
        "load-step-50",
        "--paper-faithful-metrics",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let m: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(m[0]["mode"], "raw");
}

#[test]
fn metrics_recomputes_from_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(srfpll(&["simulate", "--preset", "ramp-startup", "--out", out])
        .status
        .success());
    let trace = dir.path().join("trace.csv");
    let o = srfpll(&[
        "metrics",
        "--trace",
        trace.to_str().unwrap(),
        "--window",
        "9:10",
        "--name",
        "ramp-startup-100/ff-estimated",
    ]);
    assert!(o.status.success());
    let again: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let orig: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(again[0], orig[0]);
}

#[test]
fn bad_config_exits_2_with_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("ramp-startup", FeedForward::Estimated).unwrap();
    cfg.name.clear();
    cfg.estimator.gamma = 0.0;
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, cfg.to_toml_string()).unwrap();
    let o = srfpll(&[
        "--error-json",
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["violations"].as_array().unwrap().len(), 2);
}

#[test]
fn unknown_preset_is_a_config_error() {
    let o = srfpll(&["simulate", "--preset", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

/// 2 s at 4 kHz with 0.05 s missing after t = 0.5.
fn write_recording(path: &Path) {
    let dt = 0.00025;
    let mut text = String::from("time,ia,ib,ic,angle\n");
    for k in 0..8000usize {
        if (2000..2200).contains(&k) {
            continue;
        }
        let t = k as f64 * dt;
        let th = 50.0 * t;
        let ph = |s: f64| 3.0 * (th - s).cos();
        text.push_str(&format!(
            "{t},{},{},{},{th}\n",
            ph(0.0),
            ph(2.094_395_102_393_195),
            ph(4.188_790_204_786_391)
        ));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn ingest_run_with_renamed_columns_and_gap() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rec.csv");
    write_recording(&input);
    let out = dir.path().join("out");
    let o = srfpll(&[
        "ingest-run",
        "--input",
        input.to_str().unwrap(),
        "--t-col",
        "time",
        "--a-col",
        "ia",
        "--b-col",
        "ib",
        "--c-col",
        "ic",
        "--theta-col",
        "angle",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 8001);
    let invalid = trace
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(4) == Some("0"))
        .count();
    assert_eq!(invalid, 200);
    let m: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(m[0]["E_me"].as_f64().unwrap() < 0.1);
}

#[test]
fn ingest_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rec.csv");
    std::fs::write(&input, "t,za,zb,zc\n0,1,0,0\n0,1,0,0\n").unwrap();
    let o = srfpll(&["--error-json", "ingest-run", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(v["message"].as_str().unwrap().contains("row 2"), "{v}");

    let o = srfpll(&[
        "ingest-run",
        "--input",
        dir.path().join("missing.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn ingest_rejects_foreign_sampling_rate_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rec.csv");
    let mut text = String::from("t,za,zb,zc\n");
    for k in 0..2000 {
        let th = 50.0 * k as f64 * 0.001;
        text.push_str(&format!(
            "{},{},{},{}\n",
            k as f64 * 0.001,
            th.cos(),
            (th - 2.0944).cos(),
            (th + 2.0944).cos()
        ));
    }
    std::fs::write(&input, text).unwrap();
    let o = srfpll(&[
        "ingest-run",
        "--input",
        input.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = srfpll(&[
        "ingest-run",
        "--input",
        input.to_str().unwrap(),
        "--allow-dt-mismatch",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
