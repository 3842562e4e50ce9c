//! Contract tests for the `solve` binary: exit codes, artifact schemas,
//! CSV headers, and configuration precedence.

use std::path::Path;
use std::process::{Command, Output};

fn solve(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solve"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|err| {
        panic!(
            "stdout is not JSON ({err}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

#[test]
fn supercritical_power_exits_3_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(
        &["ground-state", "--N", "3", "--m", "1", "--p", "5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("critical exponent"), "stderr: {stderr}");
}

#[test]
fn n4_nonexistence_exits_4_with_regime_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(
        &[
            "kirchhoff",
            "--N",
            "4",
            "--m",
            "1",
            "--p",
            "2",
            "--a",
            "1",
            "--b",
            "1e9",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    let json = stdout_json(&out);
    assert_eq!(json["regime"], "NONE_N4");
    assert_eq!(json["roots"].as_array().unwrap().len(), 0);
    assert_eq!(json["spec_version"], "1.0.0");
}

#[test]
fn unreachable_decay_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // A range of five decay lengths cannot reach the far-field cut.
    let out = solve(
        &[
            "ground-state",
            "--N",
            "3",
            "--m",
            "1",
            "--p",
            "3",
            "--r-max-factor",
            "5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn failed_residual_gates_exit_5_but_write_the_report() {
    let dir = tempfile::tempdir().unwrap();
    // The one-node profile's FD residual on the default grid sits above
    // the 1e-4 gate, so the run must flag verification failure.
    let out = solve(
        &[
            "kirchhoff",
            "--N",
            "3",
            "--m",
            "1",
            "--p",
            "3",
            "--a",
            "1",
            "--b",
            "1",
            "--nodes",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(5));
    let json = stdout_json(&out);
    assert_eq!(json["gates_passed"], false);
    let artifact = dir.path().join("kirchhoff_unique.json");
    assert!(artifact.exists());
    let branch: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(artifact).unwrap()).unwrap();
    assert_eq!(branch["gates_passed"], false);
    assert_eq!(branch["nodes"], 1);
}

#[test]
fn ground_state_artifacts_follow_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(
        &["ground-state", "--N", "3", "--m", "1", "--p", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    for key in [
        "spec_version",
        "config",
        "N",
        "m",
        "p",
        "xi",
        "nodes",
        "K",
        "GInt",
    ] {
        assert!(json.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(json["config"]["grid_points"], 4096);
    assert!((json["xi"].as_f64().unwrap() - 4.3374).abs() < 1e-3);

    let sidecar = std::fs::read_to_string(dir.path().join("ground_state.json")).unwrap();
    assert_eq!(sidecar, String::from_utf8_lossy(&out.stdout));

    let csv = std::fs::read_to_string(dir.path().join("ground_state.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,v,dv"));
    let first_row = lines.next().unwrap();
    assert!(
        first_row.starts_with("0,"),
        "grid starts at r = 0: {first_row}"
    );
    assert_eq!(
        csv.lines().count(),
        4097,
        "header plus one row per grid point"
    );
}

#[test]
fn sweep_csv_has_the_fixed_header_and_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(
        &[
            "sweep",
            "--N",
            "3",
            "--m",
            "1",
            "--p",
            "3",
            "--a-lo",
            "0.5",
            "--a-hi",
            "2",
            "--a-steps",
            "2",
            "--b-lo",
            "0.1",
            "--b-hi",
            "10",
            "--b-steps",
            "2",
            "--b-scale",
            "log",
            "--level",
            "none",
            "--out",
            "grid.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "N,a,b,K,regime,t1,t2,a_max,I,pohozaev_res,pde_res"
    );
    assert_eq!(lines.len(), 5, "header and four rows");
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 11);
        assert_eq!(cells[0], "3");
        assert_eq!(cells[4], "UNIQUE_N3");
        assert!(!cells[5].is_empty(), "t1 present");
        assert!(cells[6].is_empty(), "no second root at N = 3");
        assert!(cells[7].is_empty(), "no threshold at N = 3");
        assert!(cells[8].is_empty(), "level none skips actions");
    }
    // a-major ordering: the first two rows share the smaller a.
    let a_of = |row: &str| row.split(',').nth(1).unwrap().to_owned();
    assert_eq!(a_of(lines[1]), a_of(lines[2]));
    assert_ne!(a_of(lines[2]), a_of(lines[3]));
    assert_eq!(a_of(lines[3]), a_of(lines[4]));
}

#[test]
fn flags_take_precedence_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    let from_env = Command::new(env!("CARGO_BIN_EXE_solve"))
        .args(["ground-state", "--N", "3", "--m", "1", "--p", "3"])
        .env("KIRCHHOFF_GRID_POINTS", "128")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(from_env.status.code(), Some(0));
    let json = stdout_json(&from_env);
    assert_eq!(json["config"]["grid_points"], 128);

    let from_flag = Command::new(env!("CARGO_BIN_EXE_solve"))
        .args([
            "ground-state",
            "--N",
            "3",
            "--m",
            "1",
            "--p",
            "3",
            "--grid-points",
            "256",
        ])
        .env("KIRCHHOFF_GRID_POINTS", "128")
        .current_dir(dir.path())
        .output()
        .unwrap();
    let json = stdout_json(&from_flag);
    assert_eq!(json["config"]["grid_points"], 256);
}

#[test]
fn threshold_verdict_flips_at_bk_equal_one() {
    let dir = tempfile::tempdir().unwrap();
    // K for (m=1, p=2, N=4) is about 817.7, so b = 1e-3 sits below the
    // barrier and b = 2e-3 above it.
    let below = stdout_json(&solve(
        &[
            "threshold",
            "--N",
            "4",
            "--m",
            "1",
            "--p",
            "2",
            "--b",
            "1e-3",
        ],
        dir.path(),
    ));
    assert_eq!(below["verdict"], "EXISTS_IFF_BK_BELOW_ONE");
    assert_eq!(below["exists"], true);
    assert!(below["bK"].as_f64().unwrap() < 1.0);

    let above = stdout_json(&solve(
        &[
            "threshold",
            "--N",
            "4",
            "--m",
            "1",
            "--p",
            "2",
            "--b",
            "2e-3",
        ],
        dir.path(),
    ));
    assert_eq!(above["exists"], false);
    assert!(above["bK"].as_f64().unwrap() > 1.0);
}

#[test]
fn branch_flag_selects_a_single_root_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let th = stdout_json(&solve(
        &["threshold", "--N", "5", "--m", "1", "--p", "2", "--b", "1"],
        dir.path(),
    ));
    let a = 0.9 * th["a_max"].as_f64().unwrap();
    let out = solve(
        &[
            "kirchhoff",
            "--N",
            "5",
            "--m",
            "1",
            "--p",
            "2",
            "--a",
            &a.to_string(),
            "--b",
            "1",
            "--branch",
            "lower",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("kirchhoff_lower.json").exists());
    assert!(!dir.path().join("kirchhoff_upper.json").exists());
    let json = stdout_json(&out);
    assert_eq!(json["scaling"]["regime"], "TWO_ROOTS");
    assert_eq!(json["solutions"].as_array().unwrap().len(), 1);
    assert_eq!(json["solutions"][0]["branch"], "lower");
}

#[test]
fn verify_battery_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(&["verify"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "verify output:\n{stdout}");
    assert!(stdout.contains("PASS ground_state_reference"));
    assert!(!stdout.contains("FAIL"));
}
