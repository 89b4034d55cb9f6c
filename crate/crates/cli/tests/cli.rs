use std::path::Path;
use std::process::{Command, Output};

fn charshock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charshock")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) {
    let out = charshock(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_sine_reports_two_formations_and_a_merge() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    run_ok(&["simulate", "--preset", "burgers-sine", "--horizon", "1.05", "--out", s(&out), "--check"]);
    let events = rows(&out.join("events.csv"));
    let kinds: Vec<&str> = events.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "formation").count(), 2);
    assert_eq!(kinds.iter().filter(|k| **k == "merge").count(), 1);
    for f in ["shocks.csv", "singular_points.csv", "profiles.csv", "summary.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn constant_data_has_empty_shock_table() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["simulate", "--preset", "constant-data", "--out", s(dir.path()), "--check"]);
    assert!(rows(&dir.path().join("shocks.csv")).is_empty());
}

#[test]
fn blowup_map_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["blowup-map", "--preset", "burgers-sine", "--out", s(dir.path()), "--check"]);
    let mut checked = 0;
    for r in rows(&dir.path().join("blowup_map.csv")) {
        if r[1].is_empty() {
            continue;
        }
        let (y, t): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert!((t * (1.0 - y.cos()) - 1.0).abs() < 1e-6, "y = {y}");
        checked += 1;
    }
    assert!(checked > 100);
    assert_eq!(rows(&dir.path().join("seeds.csv")).len(), 2);
}

#[test]
fn genericity_scan_finds_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["genericity-scan", "--preset", "burgers-sine", "--out", s(dir.path()), "--check"]);
    assert!(rows(&dir.path().join("violations.csv")).is_empty());
}

#[test]
fn sensitivity_writes_mirrored_shifts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sensitivity", "--preset", "prop11", "--delta", "0.2", "--intervals", "4"];
    run_ok(&[&args[..], &["--out", s(dir.path()), "--check"]].concat());
    let shifts = rows(&dir.path().join("shifts.csv"));
    assert!(shifts.iter().any(|r| r[1] == "0") && shifts.iter().any(|r| r[1] == "1"));
}

#[test]
fn optimize_prop11_merges_at_the_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(dir.path());
    run_ok(&["optimize", "--preset", "prop11", "--intervals", "4", "--dt", "2e-3", "--out", out, "--check"]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("prop11_report.json")).unwrap()).unwrap();
    let t = report["merge_time"].as_f64().unwrap();
    assert!((0.88..=0.905).contains(&t), "merge at {t}");
    let alpha = rows(&dir.path().join("alpha_star.csv"));
    assert_eq!(alpha.len(), 4);
    let history: Vec<f64> = rows(&dir.path().join("cost_history.csv")).iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(history.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"problem": {"flux": "burgers", "initial": "sine", "window": [-20, 20]}}"#).unwrap();
    let out = charshock(&["simulate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));

    assert_eq!(charshock(&["simulate", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(charshock(&["simulate"]).status.code(), Some(2));
    assert_eq!(charshock(&["simulate", "--preset", "prop11", "--horizon", "0.5"]).status.code(), Some(2));
}

#[test]
fn solver_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("late.json");
    std::fs::write(&cfg, r#"{"problem": {"preset": "burgers-sine", "horizon": 0.5}, "profile_times": [0.9]}"#).unwrap();
    let out = charshock(&["simulate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn failed_checks_exit_with_four() {
    // too coarse a fan to resolve the blow-up
    let dir = tempfile::tempdir().unwrap();
    let out = charshock(&["simulate", "--preset", "burgers-sine", "--ygrid", "30", "--out", s(dir.path()), "--check"]);
    assert_eq!(out.status.code(), Some(4));
    // without --check the same run succeeds
    let out = charshock(&["simulate", "--preset", "burgers-sine", "--ygrid", "30", "--out", s(dir.path())]);
    assert!(out.status.success());
}

#[test]
fn runs_are_byte_identical_and_manifests_replay() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["burgers-sine", "constant-data", "prop11"] {
        let (a, b, c) = (dir.path().join(format!("{preset}-a")), dir.path().join(format!("{preset}-b")), dir.path().join(format!("{preset}-c")));
        run_ok(&["simulate", "--preset", preset, "--out", s(&a)]);
        run_ok(&["simulate", "--preset", preset, "--out", s(&b)]);
        run_ok(&["simulate", "--config", s(&a.join("manifest.json")), "--out", s(&c)]);
        for f in ["shocks.csv", "events.csv", "singular_points.csv", "profiles.csv"] {
            let first = std::fs::read(a.join(f)).unwrap();
            assert_eq!(first, std::fs::read(b.join(f)).unwrap(), "{preset}/{f}");
            assert_eq!(first, std::fs::read(c.join(f)).unwrap(), "{preset}/{f} replay");
        }
    }
}
