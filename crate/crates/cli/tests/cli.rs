//! End-to-end checks of the command-line tool: flag parsing, artifacts,
//! exit codes, and byte-level determinism of the reports.

use std::fs;
use std::path::Path;
use std::process::Command;

fn savns() -> Command {
    Command::new(env!("CARGO_BIN_EXE_savns"))
}

fn tmp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("savns-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"))
}

#[test]
fn converge_writes_report_and_manifest() {
    let dir = tmp_dir("converge");
    let status = savns()
        .args([
            "converge",
            "--case",
            "example2",
            "--scheme",
            "psav1",
            "--grid",
            "16",
            "--dts",
            "1/2,1/4",
            "--out",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let report = read(&dir.join("report.csv"));
    assert!(report.starts_with("param,err_u_linf,err_p_l2,div_linf,q_drift,order_u,order_p,seconds"));
    assert_eq!(report.lines().count(), 3);
    let manifest = read(&dir.join("run.json"));
    assert!(manifest.contains("\"command\": \"converge\""));
    assert!(manifest.contains("\"schemes\""));
}

#[test]
fn missing_scheme_exits_with_config_code() {
    let output = savns()
        .args(["converge", "--case", "example2", "--dts", "1/2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--scheme"), "stderr: {stderr}");
}

#[test]
fn unknown_case_names_the_field() {
    let output = savns()
        .args([
            "converge", "--case", "example9", "--scheme", "psav1", "--dts", "1/2",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("case"), "stderr: {stderr}");
}

#[test]
fn reports_are_byte_identical_without_timing() {
    let dir_a = tmp_dir("det-a");
    let dir_b = tmp_dir("det-b");
    for dir in [&dir_a, &dir_b] {
        let status = savns()
            .args([
                "converge",
                "--case",
                "example2",
                "--scheme",
                "psav2",
                "--grid",
                "16",
                "--dts",
                "1/2,1/4",
                "--no-timing",
                "--jobs",
                "2",
                "--out",
            ])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(read(&dir_a.join("report.csv")), read(&dir_b.join("report.csv")));
    assert_eq!(read(&dir_a.join("run.json")), read(&dir_b.join("run.json")));
}

#[test]
fn eps_sweep_accepts_the_study_protocol_shape() {
    let dir = tmp_dir("eps");
    let status = savns()
        .args([
            "eps-sweep",
            "--case",
            "example2",
            "--schemes",
            "psav2,srsav2",
            "--dt",
            "1/8",
            "--eps-list",
            "0.1,0.05",
            "--grid",
            "16",
            "--out",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    for scheme in ["psav2", "srsav2"] {
        let report = read(&dir.join(format!("report-{scheme}.csv")));
        assert_eq!(report.lines().count(), 3, "{scheme}");
    }
}

#[test]
fn eps_sweep_rejects_projection_with_config_code() {
    let output = savns()
        .args([
            "eps-sweep",
            "--case",
            "example2",
            "--schemes",
            "projection",
            "--dt",
            "1/4",
            "--eps-list",
            "0.1",
            "--grid",
            "16",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn zero_regularization_iterations_exit_with_config_code() {
    let output = savns()
        .args([
            "converge", "--case", "example2", "--scheme", "srsav1", "--grid", "16", "--dts",
            "1/2", "--s", "0",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("iteration"), "stderr: {stderr}");
}

#[test]
fn energy_study_writes_one_series_per_dt() {
    let dir = tmp_dir("energy");
    let status = savns()
        .args([
            "energy", "--case", "example2", "--scheme", "psav2", "--grid", "16", "--dts",
            "1/4,1/8", "--out",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    for name in ["energy-1_4.csv", "energy-1_8.csv"] {
        let csv = read(&dir.join(name));
        assert!(csv.starts_with("t,original_energy,modified_energy"));
        assert!(csv.lines().count() > 4);
    }
}

#[test]
fn simulate_zero_data_writes_zero_snapshots() {
    let dir = tmp_dir("simulate-zero");
    let status = savns()
        .args([
            "simulate",
            "--case",
            "zero",
            "--scheme",
            "psav1",
            "--grid",
            "8",
            "--dt",
            "1/4",
            "--t-end",
            "0.5",
            "--snapshot-every",
            "1",
            "--out",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let u0 = read(&dir.join("u_000000"));
    assert!(u0.lines().count() > 8);
    let final_u = read(&dir.join("u_000002"));
    for line in final_u.lines().skip(1) {
        for tok in line.split_whitespace() {
            assert_eq!(tok.parse::<f64>().unwrap(), 0.0);
        }
    }
    assert!(dir.join("checkpoint").exists());
    assert!(dir.join("energy.csv").exists());
}

#[test]
fn simulate_restarts_from_a_written_field() {
    let dir = tmp_dir("simulate-restart");
    let status = savns()
        .args([
            "simulate", "--case", "example2", "--scheme", "psav1", "--grid", "16", "--dt",
            "1/4", "--t-end", "0.5", "--out",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    // restart from the final velocity snapshot
    let final_u = dir.join("u_000002");
    assert!(final_u.exists());
    let dir2 = tmp_dir("simulate-restart2");
    let status = savns()
        .args(["simulate", "--scheme", "psav1", "--dt", "1/4", "--t-end", "0.25", "--initial"])
        .arg(&final_u)
        .args(["--out"])
        .arg(&dir2)
        .status()
        .unwrap();
    assert!(status.success());
}
