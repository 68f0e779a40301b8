//! End-to-end tests of the `habwave` binary: exit codes, manifests, and the
//! artifact layout, driven through real configuration files in temporary
//! directories.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn habwave(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_habwave"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) {
    fs::write(dir.join(name), content).expect("config written");
}

// Rightward-drifting kernel over a ramp habitat: the leftward speed is -1
// and the rightward speed is 3, so 20 iterations on [-80, 80] keep every
// diagnostic window inside the grid with real margins.
const SIMULATE_BASE: &str = r#"
[grid]
x_min = -80.0
x_max = 80.0
points = 801

[kernel]
family = "gaussian"
mean = 2.0
variance = 0.5

[habitat]
model = "patch_with_ramp"
beta = 5.0

[initial]
shape = "bump"
center = 0.0
width = 4.0
height = 1.0

[run]
steps = 20
snapshot_every = 4
"#;

#[test]
fn speed_run_writes_manifest_and_curve() {
    let tmp = tempfile::tempdir().expect("tempdir");
    write(
        tmp.path(),
        "speed.toml",
        r#"
[kernel]
family = "gaussian"
mean = 2.0
variance = 0.5

[speed]
coef = 2.718281828459045
epsilon = 0.4
"#,
    );
    let out = habwave(&["speed", "--config", "speed.toml", "--out", "run"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("c_star_minus"), "table printed: {stdout}");

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run/manifest.json")).unwrap())
            .expect("valid manifest json");
    assert_eq!(manifest["status"], "pass");
    assert_eq!(manifest["command"], "speed");
    assert!(manifest["wall_ms"].is_u64());
    let c_minus = manifest["summary"]["minus"]["c_star"].as_f64().expect("speed recorded");
    assert!((c_minus + 1.0).abs() < 1e-6);

    let curve = fs::read_to_string(tmp.path().join("run/objective_curve.csv")).unwrap();
    assert!(curve.starts_with("mu,c_minus,c_plus"));
    assert!(curve.lines().count() > 100);
}

#[test]
fn simulate_passes_and_archives_snapshots() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let config = format!(
        "{SIMULATE_BASE}
[diagnostics]
level = 0.5
eps = 0.5

[diagnostics.convergence]

[diagnostics.annihilation]
"
    );
    write(tmp.path(), "sim.toml", &config);
    let out = habwave(
        &["simulate", "--config", "sim.toml", "--out", "run", "--svg"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let index = fs::read_to_string(tmp.path().join("run/snapshots.csv")).unwrap();
    assert!(index.starts_with("step,file,sup_delta"));
    // Initial, five interior snapshots, final state recorded.
    assert_eq!(index.lines().count(), 1 + 6);
    assert!(tmp.path().join("run/snapshots/state_000000.csv").exists());
    assert!(tmp.path().join("run/snapshots/state_000020.csv").exists());
    assert!(tmp.path().join("run/front_trace.csv").exists());
    assert!(tmp.path().join("run/convergence_window.csv").exists());
    assert!(tmp.path().join("run/front.svg").exists());
    assert!(tmp.path().join("run/gaps.svg").exists());

    let field = fs::read_to_string(tmp.path().join("run/snapshots/state_000020.csv")).unwrap();
    assert!(field.starts_with("x,u"));
    assert_eq!(field.lines().count(), 1 + 801);
}

#[test]
fn missing_section_names_it_and_exits_three() {
    let tmp = tempfile::tempdir().expect("tempdir");
    write(
        tmp.path(),
        "broken.toml",
        "[grid]\nx_min = -5.0\nx_max = 5.0\npoints = 11\n",
    );
    let out = habwave(&["simulate", "--config", "broken.toml", "--out", "run"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`kernel`"), "names the missing section: {stderr}");
}

#[test]
fn untestable_window_is_inconclusive_not_a_failure() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let config = format!(
        "{SIMULATE_BASE}
[diagnostics]
eps = 0.5

[diagnostics.convergence]
from_step = 60
"
    );
    // Judging from step 60 in a 20-step run finds no usable window at all,
    // which proves nothing either way.
    write(tmp.path(), "inc.toml", &config);
    let out = habwave(&["simulate", "--config", "inc.toml", "--out", "run"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "stdout: {}", String::from_utf8_lossy(&out.stdout));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "inconclusive");
}

#[test]
fn failed_tolerance_exits_one() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let config = format!(
        "{SIMULATE_BASE}
[diagnostics]
eps = 0.5

[diagnostics.convergence]
gap_tol = 1e-15
"
    );
    write(tmp.path(), "fail.toml", &config);
    let out = habwave(&["simulate", "--config", "fail.toml", "--out", "run"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"), "verdict printed: {stdout}");
}

#[test]
fn counterexample_runs_without_a_config() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out = habwave(&["counterexample", "--out", "run"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("run/pulse.csv").exists());
    assert!(tmp.path().join("run/forced.csv").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "pass");
    assert!(manifest["summary"]["refusal"].as_str().unwrap().contains("not linearly controlled"));
}

#[test]
fn sweep_isolates_runs_and_reports_the_worst_status() {
    let tmp = tempfile::tempdir().expect("tempdir");
    write(
        tmp.path(),
        "sweep.toml",
        r#"
jobs = 2

[[runs]]
name = "ok"
command = "speed"

[runs.kernel]
family = "gaussian"
mean = 2.0
variance = 0.5

[runs.speed]
coef = 2.718281828459045

[[runs]]
name = "broken"
command = "speed"

[runs.speed]
coef = 2.0
"#,
    );
    let out = habwave(&["sweep", "--config", "sweep.toml", "--out", "runs"], tmp.path());
    // The second run has a coefficient but no kernel section: exit 3 overall.
    assert_eq!(out.status.code(), Some(3));
    assert!(tmp.path().join("runs/ok/manifest.json").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("runs/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "error");
    let entries = manifest["summary"]["runs"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
}

#[test]
fn help_and_bad_flags_use_the_documented_exit_codes() {
    let tmp = tempfile::tempdir().expect("tempdir");
    assert_eq!(habwave(&["--help"], tmp.path()).status.code(), Some(0));
    assert_eq!(habwave(&["--version"], tmp.path()).status.code(), Some(0));
    assert_eq!(habwave(&["speed"], tmp.path()).status.code(), Some(3));
    assert_eq!(habwave(&["frobnicate"], tmp.path()).status.code(), Some(3));
}
