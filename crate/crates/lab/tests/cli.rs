use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qmlab(args: &[&str], config: Option<&str>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qmlab"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(text) = config {
        let path = out.with_extension("toml");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn summary(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn weakstar_passes_and_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = qmlab(&["weakstar"], None, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["schema_version"], 1);
    assert_eq!(s["verdict"], "PASS");
    assert_eq!(s["experiments"][0]["name"], "weakstar");
    let csv = fs::read_to_string(out.join("weakstar.csv")).unwrap();
    assert!(csv.starts_with("kind,function,n,"));
    // 4 functions × 50 degrees plus 6 residual rows
    assert_eq!(csv.lines().count(), 1 + 206);
}

#[test]
fn csv_only_skips_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = qmlab(&["pinfty", "--format", "csv"], None, &out);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("pinfty.csv").exists());
    assert!(!out.join("summary.json").exists());
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = qmlab(&["weakstar"], Some("[weakstar]\ndegrees = [1]\n"), &dir.path().join("a"));
    assert_eq!(o.status.code(), Some(2));
    let o = qmlab(&["sphere-instability"], Some("[sphere_instability]\nkappa = [1.5]\n"), &dir.path().join("b"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("κ"));
    let o = qmlab(&["weakstar", "--config", "/nonexistent/qmlab.toml"], None, &dir.path().join("c"));
    assert_eq!(o.status.code(), Some(2));
    let o = qmlab(&["weakstar", "--workers", "0"], None, &dir.path().join("d"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_verdict_exits_with_1() {
    // on f = cosh the ground modes leave the waist, so the run reports FAIL
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = qmlab(&["revolution"], None, &out);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&out)["verdict"], "FAIL");
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("failed: ground window mass"), "{stdout}");
}

#[test]
fn empty_grid_is_header_only_no_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = qmlab(&["weakstar"], Some("[weakstar]\nn = []\nfunctions = []\nresidual_n = []\n"), &out);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("weakstar.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert_eq!(summary(&out)["experiments"][0]["verdict"], "NO-DATA");
}

#[test]
fn single_point_verdict_matches_its_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let text = "[weakstar]\nn = [10]\nfunctions = [\"cos2\"]\nresidual_n = []\nfinal_gap = 0.05\n";
    let o = qmlab(&["weakstar"], Some(text), &out);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("weakstar.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].ends_with(",true"));
    // 1/23, the Wallis ratio at n = 10
    let measured: f64 = rows[1].split(',').nth(4).unwrap().parse().unwrap();
    assert!((measured - 1.0 / 23.0).abs() < 1e-12);
    assert_eq!(summary(&out)["experiments"][0]["verdict"], "PASS");
}

#[test]
fn seed_controls_the_randomized_trials() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        assert_eq!(qmlab(&["pinfty", "--seed", seed], None, &out).status.code(), Some(0));
        fs::read(out.join("pinfty.csv")).unwrap()
    };
    let a = read("a", "5");
    assert_eq!(a, read("b", "5"));
    assert_ne!(a, read("c", "6"));
}

#[test]
fn echoed_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_eq!(qmlab(&["pinfty", "--seed", "77"], None, &out).status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["seed"], 77);
    let echoed = qmlab::config::Config::from_toml(s["config"].as_str().unwrap(), "summary").unwrap();
    assert_eq!(echoed.seed, 77);
    assert_eq!(echoed.sphere_instability, qmlab::config::SphereInstabilityConfig::default());
}
