//! End-to-end tests of the `dynreg` binary: exit-code contract, artifact
//! layout, and diagnostics.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynreg"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_static_config_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run"])
        .arg(configs_dir().join("static.json"))
        .arg("--output-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(tmp.path().join("trace.csv").exists());
    assert!(tmp.path().join("report.json").exists());
    assert!(tmp.path().join("config.json").exists());

    // Static environment: the whole dynamic regret is the round-1 gap.
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("report.json")).unwrap())
            .unwrap();
    let regret = report["dynamic_regret"].as_f64().unwrap();
    // x1 = (0.8, 0), quadratic centered at the origin with curvature 1.
    assert!((regret - 0.5 * 0.8 * 0.8).abs() < 1e-12);
    assert_eq!(report["p_star"].as_f64().unwrap(), 0.0);
}

#[test]
fn run_all_bundled_configs_succeed() {
    for name in [
        "constant_drift.json",
        "sqrt_t_drift.json",
        "mixed_drift.json",
        "boundary.json",
    ] {
        let tmp = tempfile::tempdir().unwrap();
        let out = bin()
            .args(["run"])
            .arg(configs_dir().join(name))
            .arg("--output-dir")
            .arg(tmp.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{name} stderr: {}", stderr(&out));
    }
}

#[test]
fn bad_learning_rate_exits_1_citing_precondition() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs_dir().join("static.json")).unwrap();
    let bad = text.replace("\"eta\": 1.0", "\"eta\": 2.0");
    let path = tmp.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let out = bin().args(["run"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("eta <= 1/L"),
        "diagnostic missing rate precondition: {}",
        stderr(&out)
    );
}

#[test]
fn unknown_config_key_exits_1_naming_key() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs_dir().join("static.json")).unwrap();
    let bad = text.replace("\"eta\": 1.0,", "\"eta\": 1.0, \"safety_margin\": 3,");
    let path = tmp.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let out = bin().args(["run"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("safety_margin"), "{}", stderr(&out));
}

#[test]
fn report_round_trip_and_tamper_detection() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run"])
        .arg(configs_dir().join("constant_drift.json"))
        .arg("--output-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let trace = tmp.path().join("trace.csv");
    let out = bin().args(["report"]).arg(&trace).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    // Flip one cell and expect a named mismatch.
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut fields: Vec<String> = lines[3].split(',').map(str::to_string).collect();
    let col = fields.len() - 4; // dist_before
    fields[col] = "1.2345678901234567e-1".into();
    lines[3] = fields.join(",");
    std::fs::write(&trace, lines.join("\n") + "\n").unwrap();

    let out = bin().args(["report"]).arg(&trace).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("dist_before"), "{}", stderr(&out));
}

#[test]
fn report_on_missing_trace_exits_1() {
    let out = bin()
        .args(["report", "/nonexistent/trace.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_passes_and_names_properties() {
    let out = bin().args(["selftest"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let passes = text.lines().filter(|l| l.starts_with("PASS")).count();
    assert!(passes >= 12, "only {passes} named properties passed:\n{text}");
    assert!(text.contains("contraction_mistuned_counterexample"));
}

#[test]
fn sweep_writes_csv_with_expected_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sweep"])
        .arg(configs_dir().join("constant_drift.json"))
        .args(["--horizons", "50,100"])
        .arg("--output-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "T,p_star,s_star,dynamic_regret,theorem1_rhs,theorem2_rhs,ratio_regret_over_p"
    );
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn seed_offset_env_shifts_runs() {
    let tmp_a = tempfile::tempdir().unwrap();
    let tmp_b = tempfile::tempdir().unwrap();
    let config = configs_dir().join("constant_drift.json");
    let run = |dir: &Path, offset: &str| {
        let out = bin()
            .args(["run"])
            .arg(&config)
            .arg("--output-dir")
            .arg(dir)
            .env("DYNREG_SEED_OFFSET", offset)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    };
    run(tmp_a.path(), "0");
    run(tmp_b.path(), "7");
    let a = std::fs::read(tmp_a.path().join("trace.csv")).unwrap();
    let b = std::fs::read(tmp_b.path().join("trace.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn dump_minimizers_writes_audit_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run"])
        .arg(configs_dir().join("static.json"))
        .arg("--output-dir")
        .arg(tmp.path())
        .arg("--dump-minimizers")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(tmp.path().join("minimizers.csv")).unwrap();
    assert!(csv.starts_with("round,x_star_0,x_star_1\n"));
    assert_eq!(csv.lines().count(), 201);
}
