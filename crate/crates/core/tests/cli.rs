use std::path::Path;
use std::process::{Command, Output};

fn actor_risk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actor-risk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn short_case_study(dir: &Path) -> String {
    let path = dir.join("short.toml");
    let p = path.to_str().unwrap().to_string();
    let out = actor_risk(&[
        "casestudy",
        "--out",
        &p,
        "--no-brake",
        "--steady-ticks",
        "60",
        "--steady2-ticks",
        "60",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    p
}

#[test]
fn oracle_prints_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_case_study(dir.path());
    let out = actor_risk(&["oracle", "--scenario", &scenario, "--t", "0", "--k", "30"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,value"));
    assert!(text.contains("\nactor_id,without_count,rho\n"));
    assert!(text.lines().any(|l| l.starts_with("208,")));
}

#[test]
fn oracle_rejects_uneven_steps() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_case_study(dir.path());
    let out = actor_risk(&["oracle", "--scenario", &scenario, "--t", "0", "--k", "31"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_and_malformed_scenarios_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let out = actor_risk(&[
        "oracle",
        "--scenario",
        missing.to_str().unwrap(),
        "--t",
        "0",
        "--k",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "dt = 0.1\n[map\n").unwrap();
    let out = actor_risk(&[
        "oracle",
        "--scenario",
        bad.to_str().unwrap(),
        "--t",
        "0",
        "--k",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_case_study(dir.path());
    let out_dir = dir.path().join("out");
    let out = actor_risk(&[
        "run",
        "--scenario",
        &scenario,
        "--operator",
        "euclid",
        "--horizon",
        "30",
        "--replan-every",
        "30",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = std::fs::read_to_string(out_dir.join("run.csv")).unwrap();
    assert_eq!(
        run.lines().next(),
        Some("tick,phase,actor_id,gamma_euclid,gamma_kl,rho_exact,mean_gamma,var_gamma,prediction_error,ego_lane,plan_partial")
    );
    assert!(run.lines().count() > 1);
    for f in ["phase_summary.csv", "scatter.svg", "risk_timeline.svg"] {
        assert!(out_dir.join(f).is_file(), "{f} missing");
    }
    assert!(std::fs::read_to_string(out_dir.join("scatter.svg"))
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn run_rejects_horizon_below_replan_cadence() {
    let dir = tempfile::tempdir().unwrap();
    let out = actor_risk(&[
        "run",
        "--casestudy-defaults",
        "--horizon",
        "10",
        "--replan-every",
        "15",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
