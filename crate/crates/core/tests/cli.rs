use std::path::Path;
use std::process::{Command, Output};

fn dce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dce")).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn spectrum_writes_one_row_per_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = dce(&["spectrum", "--gamma", "10", "--theta", "0.5", "--n-max", "16", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    assert!(text.starts_with("n,N_mean,tail_bound\n"));
    assert_eq!(text.lines().count(), 17);
    assert!(!text.contains('\r'));
}

#[test]
fn zero_squeeze_spectrum_is_zero() {
    let o = dce(&["spectrum", "--v", "0.6", "--rho-power", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').nth(1), Some("0.0"), "{line}");
    }
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, name: &str| {
        let out = dir.path().join(name);
        let o = dce(&[
            "scan", "--gamma", "10", "--n", "1,2", "--grid", "0:0.9:19", "--workers", workers, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("1", "a.csv");
    let b = run("1", "b.csv");
    let c = run("3", "c.csv");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("theta,n,N_mean,tail_bound\n0.0,1,0.0,0.0\n0.0,2,0.0,0.0\n"), "{text}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# example\ncommand = spectrum\ngamma = 2.0\ntheta = 0.3\nn-max = 3\n").unwrap();
    let o = dce(&["--config", cfg.to_str().unwrap(), "--n-max", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 6);
}

#[test]
fn maxima_table_columns() {
    let o = dce(&["maxima", "--gamma", "2", "--tol", "1e-4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,n,theta_max_predicted,theta_max_exact,N_at_max,multimodal"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let predicted: f64 = row[2].parse().unwrap();
    let exact: f64 = row[3].parse().unwrap();
    assert!((predicted - 0.74).abs() < 0.005, "{predicted}");
    assert!((exact - 0.85).abs() < 0.01, "{exact}");
    // At gamma = 2 the n = 1 curve carries a second, lower peak near theta = 0.25.
    assert_eq!(row[5], "true");
}

#[test]
fn verify_report_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = dce(&["verify", "--suite", "zeros", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    let rows = report.as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for r in rows {
        assert_eq!(r["suite"], "zeros");
        assert_eq!(r["status"], "pass");
        assert!(r["measured"].is_number() && r["threshold"].is_number() && r["params"].is_object());
    }
}

#[test]
fn failing_checks_exit_with_one() {
    // The evolution route at a 64-mode basis misses the 1e-4 target.
    let o = dce(&["oracle"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report.as_array().unwrap().iter().any(|r| r["status"] == "fail"));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["spectrum", "--gamma", "10"],
        vec!["spectrum", "--gamma", "10", "--theta", "0.5", "--format", "json"],
        vec!["scan", "--gamma", "10", "--grid", "0:1:5"],
        vec!["verify", "--suite", "nope"],
        vec!["spectrum", "--gamma", "0.5", "--theta", "0.5"],
        vec!["--config", "/nonexistent/run.cfg"],
        vec!["spectrum", "--v", "0.5", "--gamma", "2", "--theta", "0.5"],
    ] {
        let o = dce(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}
