use std::process::{Command, Output};

use polytunnel_cli::report::SWEEP_COLUMNS;
use polytunnel_cli::{run, summary_path, ConfigOverrides, ExperimentConfig, Format, Mode, Particle};
use proptest::prelude::*;
use serde_json::Value;

fn polytunnel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polytunnel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn stderr_error(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("json error object");
    v["error"].clone()
}

#[test]
fn scatter_json_conserves_flux() {
    let v = stdout_json(&polytunnel(&["--mode", "scatter", "--N", "20"]));
    let s = &v["linear_solve"];
    let sum = s["T"].as_f64().unwrap() + s["R"].as_f64().unwrap();
    assert!((sum - 1.0).abs() < 1e-10);
    assert_eq!(v["c1"], 1.0);
    assert_eq!(v["comparison"]["paper_forms_consistent"], true);
}

#[test]
fn above_barrier_is_a_validation_error() {
    let out = polytunnel(&["--E-ev", "12", "--V0-ev", "9.7"]);
    assert_eq!(out.status.code(), Some(3));
    let e = stderr_error(&out);
    assert_eq!(e["code"], "NotTunneling");
    assert_eq!(e["exit_code"], 3);
}

#[test]
fn cutoff_violation_is_reported() {
    let out = polytunnel(&["--N", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["code"], "EnergyCutoffViolation");
}

#[test]
fn bad_flags_and_config_exit_2() {
    assert_eq!(polytunnel(&["--frobnicate"]).status.code(), Some(2));
    assert_eq!(polytunnel(&["--mode", "dance"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "E_ev = 5\nwidth = 3\n").unwrap();
    let out = polytunnel(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["code"], "ConfigError");
}

#[test]
fn unwritable_output_exits_4() {
    let out = polytunnel(&["--out", "/nonexistent-dir/x/out.json"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "mode = time\nN = 20\nformat = json\n").unwrap();
    let v = stdout_json(&polytunnel(&["--config", cfg.to_str().unwrap(), "--N", "10"]));
    assert_eq!(v["result"]["params"]["num_steps"], 10);
    let t = v["result"]["time_fs"].as_f64().unwrap();
    assert!((t - 1.123_032_966_926_781).abs() < 1e-8);
}

#[test]
fn sweep_csv_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = polytunnel(&[
        "--mode", "sweep", "--format", "csv", "--N-min", "1", "--N-max", "30", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, SWEEP_COLUMNS);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 24);
    assert_eq!(&rows[0][0], "7");
    for r in &rows {
        let t: f64 = r[2].parse().unwrap();
        let refl: f64 = r[3].parse().unwrap();
        assert!((t + refl - 1.0).abs() < 1e-10);
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(summary_path(&out)).unwrap()).unwrap();
    assert_eq!(summary["record_count"], 24);
    assert_eq!(summary["skipped"].as_array().unwrap().len(), 6);
    assert_eq!(summary["skipped"][0]["code"], "EnergyCutoffViolation");
}

#[test]
fn compare_mode_reports_audit() {
    let cfg = ExperimentConfig {
        mode: Mode::Compare,
        n_min: 10,
        n_max: 15,
        ..Default::default()
    };
    let artifacts = run(&cfg).unwrap();
    let v: Value = serde_json::from_str(&artifacts[0].contents).unwrap();
    assert_eq!(v["audit"]["points"], 6);
    assert_eq!(v["audit"]["certified"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn paper_coefficient_times_agree() {
    let base = ExperimentConfig {
        mode: Mode::Time,
        ..Default::default()
    };
    let paper = ExperimentConfig {
        use_paper_coefficients: true,
        ..base.clone()
    };
    let t = |c: &ExperimentConfig| {
        let v: Value = serde_json::from_str(&run(c).unwrap()[0].contents).unwrap();
        v["result"]["time_fs"].as_f64().unwrap()
    };
    assert!((t(&base) / t(&paper) - 1.0).abs() < 1e-8);
}

fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
    (
        prop_oneof![Just(Mode::Scatter), Just(Mode::Compare), Just(Mode::Sweep), Just(Mode::Time)],
        prop_oneof![Just(Format::Csv), Just(Format::Json)],
        prop::option::of(0.1f64..100.0),
        (0.01f64..10.0, 0.01f64..50.0, 0.1f64..5.0),
        (1u64..5000, 1u64..100, 100u64..1000),
        (0.0f64..1.0, 1.0f64..100.0),
        any::<bool>(),
        prop::option::of("[a-z]{1,8}\\.(csv|json)"),
    )
        .prop_map(|(mode, format, mass, (e, v0, l), (n, n_min, n_max), (lo, hi), paper, out)| {
            ExperimentConfig {
                particle: mass.map_or(Particle::Electron, |mass| Particle::Custom { mass }),
                energy_ev: e,
                barrier_height_ev: v0,
                barrier_width_nm: l,
                num_steps: n,
                n_min,
                n_max,
                mode,
                out: out.map(Into::into),
                format,
                fs_window_lo: lo,
                fs_window_hi: hi,
                use_paper_coefficients: paper,
            }
        })
}

proptest! {
    #[test]
    fn kv_config_round_trips(cfg in config_strategy()) {
        let text = cfg.to_kv_string();
        let back = ConfigOverrides::parse(&text).unwrap().apply(ExperimentConfig::default());
        prop_assert_eq!(back, cfg);
    }
}
