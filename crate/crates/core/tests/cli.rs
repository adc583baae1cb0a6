use std::path::Path;
use std::process::Command;

use fl_nse::io::report::{parse_trajectory_csv, SUITE_HEADER};

fn fl_nse(args: &[&str]) -> (i32, String, String) {
    let out =
        Command::new(env!("CARGO_BIN_EXE_fl-nse")).args(args).env("FL_NSE_THREADS", "2").output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TG_CONFIG: &str = "\
[grid]
d = 2
n = 32
[norms]
p = 2
r = 2
p_tilde = 3
[time]
T = 0.5
M = 64
gamma = 2
[picard]
eta_trials = 1
[initial]
kind = taylor-green
";

#[test]
fn gen_then_norm_matches_plancherel() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("tg.sfl");
    let (code, _, err) = fl_nse(&["gen", "--kind", "taylor-green", "--d", "2", "--n", "32", "--out", path_str(&field)]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = fl_nse(&["norm", "--field", path_str(&field), "--s", "0", "--p", "2", "--r", "2"]);
    assert_eq!(code, 0);
    let value: f64 = out.trim().parse().unwrap();
    // ‖(sin x cos y, -cos x sin y)‖_L² over [0, 2π)² is π√2
    assert!((value - std::f64::consts::PI * 2f64.sqrt()).abs() <= 1e-10, "{value}");
}

#[test]
fn norm_of_zero_field_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("zero.sfl");
    let (code, _, _) = fl_nse(&["gen", "--kind", "random-divfree", "--amp", "0", "--out", path_str(&field)]);
    assert_eq!(code, 0);
    let (code, out, _) = fl_nse(&["norm", "--field", path_str(&field), "--s", "0.5", "--p", "1.5", "--r", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn simulate_taylor_green_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tg.cfg");
    std::fs::write(&cfg, TG_CONFIG).unwrap();
    let out_dir = dir.path().join("out");
    let (code, out, err) = fl_nse(&["simulate", "--config", path_str(&cfg), "--out-dir", path_str(&out_dir)]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("converged"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "converged");
    assert!(report["heat_deviation"].as_f64().unwrap() <= 1e-8);
    assert!(report["picard"]["iterations"].as_u64().unwrap() <= 2);

    let rows = parse_trajectory_csv(&std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[0].t, 0.0);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rand.cfg");
    std::fs::write(&cfg, "[grid]\nn = 16\n[time]\nM = 16\n[initial]\nkind = random-divfree\namp = 0.5\nseed = 9\n")
        .unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let (code, _, err) = fl_nse(&["simulate", "--config", path_str(&cfg), "--out-dir", path_str(&out_dir)]);
        assert_eq!(code, 0, "{err}");
        outputs.push((
            std::fs::read(out_dir.join("report.json")).unwrap(),
            std::fs::read(out_dir.join("trajectory.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn verify_writes_suite_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.cfg");
    std::fs::write(&cfg, "[grid]\nn = 16\n[suite]\ntrials = 5\nseed = 2\n").unwrap();
    let (code, out, err) =
        fl_nse(&["verify", "--suite", "nesting", "--config", path_str(&cfg), "--out-dir", path_str(dir.path())]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("PASS nesting"));
    let csv = std::fs::read_to_string(dir.path().join("nesting.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(SUITE_HEADER));
    assert_eq!(csv.lines().count(), 11);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("nesting.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.cfg");
    let (code, _, err) = fl_nse(&["simulate", "--config", path_str(&missing)]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read config"));

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[grid]\nn = 16\ncolour = blue\n").unwrap();
    let (code, _, err) = fl_nse(&["simulate", "--config", path_str(&bad)]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"), "{err}");

    let window = dir.path().join("window.cfg");
    std::fs::write(&window, "[norms]\np = 1.5\np_tilde = 10\n").unwrap();
    let (code, _, err) = fl_nse(&["simulate", "--config", path_str(&window)]);
    assert_eq!(code, 1);
    assert!(err.contains("1/(2p) + ([d/p]-1)/(2d) < 1/p̃"), "{err}");

    let suite = dir.path().join("suite.cfg");
    std::fs::write(&suite, "[suite]\nk = 0\np = 1.5\n").unwrap();
    let (code, _, err) = fl_nse(&["verify", "--suite", "product", "--config", path_str(&suite)]);
    assert_eq!(code, 1);
    assert!(err.contains("k/d < 1/p"), "{err}");

    let (code, _, _) = fl_nse(&["norm", "--field", path_str(&missing), "--s", "0", "--p", "2", "--r", "2"]);
    assert_eq!(code, 1);
    let (code, _, _) = fl_nse(&["gen", "--kind", "vortex", "--out", path_str(&dir.path().join("x"))]);
    assert_eq!(code, 1);
}

#[test]
fn failing_suite_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("k.cfg");
    // n = 16 cannot resolve the kernel at the default scales
    std::fs::write(&cfg, "[grid]\nn = 16\n[suite]\ntrials = 1\n").unwrap();
    let (code, out, _) =
        fl_nse(&["verify", "--suite", "kernel_scaling", "--config", path_str(&cfg), "--out-dir", path_str(dir.path())]);
    assert_eq!(code, 2);
    assert!(out.starts_with("FAIL"));
}
