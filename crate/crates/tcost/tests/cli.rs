use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tcost::error::exit;

const SPACE: &str = r#"{"dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]], "mu": [0.25, 0.5, 0.25], "x0": 1}"#;
const DENSITY: &str = r#"{"h": [2.0, 0.5, 1.0]}"#;

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("space.json", SPACE);
        f.write("h.json", DENSITY);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_tcost"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn entropy_command_prints_value() {
    let f = Fixture::new();
    let o = f.run(&["entropy", "--space", "space.json", "--nu", "h.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // H = Σ μ h log h
    let expected = 0.25 * 2.0 * 2f64.ln() + 0.5 * 0.5 * 0.5f64.ln();
    assert!((json(&o)["value"].as_f64().unwrap() - expected).abs() < 1e-15);
}

#[test]
fn wasserstein_command_reports_cost_and_gap() {
    let f = Fixture::new();
    let o = f.run(&["wasserstein", "--space", "space.json", "--nu", "h.json", "--p", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    // ν = (1/2, 1/4, 1/4) against μ = (1/4, 1/2, 1/4): move 1/4 one step
    assert!((v["cost"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(v["gap"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["method"], "exact");

    let o = f.run(&["wasserstein", "--space", "space.json", "--nu", "h.json", "--p", "2", "--method", "entropic", "--eps", "0.5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["gap"].as_f64().unwrap() >= -1e-9);
    assert!(v["marginal_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn orlicz_norm_of_a_constant_function() {
    let f = Fixture::new();
    f.write("g.json", r#"{"g": [3.0, 3.0, 3.0]}"#);
    let o = f.run(&["orlicz-norm", "--space", "space.json", "--psi", "tau-star", "--g", "g.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!((json(&o)["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    let o = f.run(&["orlicz-norm", "--space", "space.json", "--psi", "tau-star", "--g", "dist2", "--product"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["product"], true);
}

#[test]
fn poincare_command_on_the_reference_grid() {
    let f = Fixture::new();
    let space = configs().join("gaussian-grid.space.json");
    let o = f.run(&["poincare", "--space", space.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let c = json(&o)["value"].as_f64().unwrap();
    assert!((c - 1.0).abs() < 1e-3, "{c}");
}

#[test]
fn flow_command_emits_monotone_traces() {
    let f = Fixture::new();
    let space = configs().join("gaussian-grid.space.json");
    let grid = tcost_core::gaussian_grid(-6.0, 6.0, 241).unwrap();
    let raw = tcost_core::space::grid_coords(-6.0, 6.0, 241).iter().map(|x| (0.7 * x).exp()).collect();
    let h = tcost_core::Density::normalized(&grid, raw).unwrap();
    f.write("h0.json", &serde_json::json!({ "h": h.h() }).to_string());
    let o = f.run(&["--out", "flow", "flow", "--space", space.to_str().unwrap(), "--h0", "h0.json", "--times", "geometric:12"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(f.path("flow/flow.csv")).unwrap();
    assert_eq!(text, String::from_utf8(o.stdout).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "time,entropy,pnorm,w2,dirichlet_sqrt,derivative_ratio");
    assert_eq!(lines.count(), 12);
}

#[test]
fn exit_codes_separate_error_classes() {
    let f = Fixture::new();
    f.write("broken.json", "{\"h\": [1.0,");
    let o = f.run(&["entropy", "--space", "space.json", "--nu", "broken.json"]);
    assert_eq!(code(&o), exit::PARSE);

    f.write("heavy.json", r#"{"h": [3.0, 3.0, 3.0]}"#);
    let o = f.run(&["entropy", "--space", "space.json", "--nu", "heavy.json"]);
    assert_eq!(code(&o), exit::PARSE, "a density of mass 3 is malformed input");

    let o = f.run(&["wasserstein", "--space", "space.json", "--nu", "h.json", "--p", "3"]);
    assert_eq!(code(&o), exit::PARAMETER);

    let o = f.run(&["check", "--space", "space.json", "--nu", "h.json", "--suite", "small-entropy", "--a", "3"]);
    assert_eq!(code(&o), exit::PARAMETER);

    let o = f.run(&[
        "wasserstein", "--space", "space.json", "--nu", "h.json", "--method", "entropic", "--eps", "1e-4", "--max-iter", "2",
    ]);
    assert_eq!(code(&o), exit::SOLVER);

    let o = f.run(&["entropy", "--space", "missing.json", "--nu", "h.json"]);
    assert_eq!(code(&o), exit::IO);

    f.write("blocker", "");
    let o = f.run(&["--out", "blocker", "check", "--space", "space.json", "--nu", "h.json", "--suite", "hlogplus"]);
    assert_eq!(code(&o), exit::IO);

    let o = f.run(&["entropy", "--no-such-flag"]);
    assert_eq!(code(&o), exit::USAGE);

    let o = f.run(&["check", "--space", "space.json", "--nu", "h.json", "--suite", "nonsense"]);
    assert_eq!(code(&o), exit::PARAMETER);
}

#[test]
fn diagnostic_failures_do_not_fail_a_run() {
    let f = Fixture::new();
    // C = 1e-6 makes every t2 diagnostic fail
    let o = f.run(&["--out", "o", "check", "--space", "space.json", "--nu", "h.json", "--suite", "t2,hlogplus", "--C", "1e-6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(f.path("o/summary.csv")).unwrap();
    assert!(summary.lines().any(|l| l.starts_with("t2,diagnostic,p=2.0;C=1e-6,0,1,0,")), "{summary}");
}

#[test]
fn assertion_violations_exit_with_code_one() {
    // two-level densities sitting just above K = H^{-1/2} break the literal
    // level-mass bound; pick one through the library, then run it via the CLI
    let n = 1000;
    let space = tcost_core::build_grid_space(0.0, (n - 1) as f64, n, &vec![0.0; n]).unwrap();
    let m = 97;
    let witness = (150..=250)
        .map(|k| k as f64 * 1e-3)
        .map(|w| {
            let high = (1.0 - w) + w * n as f64 / m as f64;
            let h: Vec<f64> = (0..n).map(|i| if i < m { high } else { 1.0 - w }).collect();
            tcost_core::validate_density(&space, h).unwrap()
        })
        .find(|d| {
            tcost_core::inequalities::small_entropy_check(&space, d, std::f64::consts::E.powi(2), 0.5, 1.05)
                .unwrap()
                .level_mass
                .is_violation()
        })
        .expect("some two-level density violates the literal bound");

    let f = Fixture::new();
    let grid = serde_json::json!({"grid": {"lo": 0.0, "hi": (n - 1) as f64, "n": n, "V": vec![0.0; n]}});
    f.write("line.json", &grid.to_string());
    f.write("two.json", &serde_json::json!({ "h": witness.h() }).to_string());
    let o = f.run(&["--out", "o", "check", "--space", "line.json", "--nu", "two.json", "--suite", "small-entropy"]);
    assert_eq!(code(&o), exit::VIOLATIONS, "{}", String::from_utf8_lossy(&o.stdout));
    let summary = fs::read_to_string(f.path("o/summary.csv")).unwrap();
    let row = |name: &str| summary.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap().to_string();
    assert!(row("small-entropy.level-mass").contains(",0,1,0,"), "{summary}");
    assert!(row("small-entropy.level-mass-rigorous").contains(",1,0,0,"), "{summary}");
}

#[test]
fn reports_are_byte_identical_and_csv_matches_json() {
    let f = Fixture::new();
    let cfg = configs().join("gaussian-sweep-v1.json");
    let a = f.run(&["--out", "a", "report", "--config", cfg.to_str().unwrap()]);
    let b = f.run(&["--threads", "2", "--out", "b", "report", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&a), code(&b));
    for file in ["report.json", "summary.csv", "constants.csv", "plot-small-entropy.csv"] {
        let x = fs::read(f.path("a").join(file)).unwrap();
        let y = fs::read(f.path("b").join(file)).unwrap();
        assert!(x == y, "{file} differs");
    }

    let report: serde_json::Value = serde_json::from_slice(&fs::read(f.path("a/report.json")).unwrap()).unwrap();
    assert_eq!(report["tool"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["name"], "gaussian-grid-sweep");
    let checks = report["summary"]["checks"].as_array().unwrap();
    let csv = fs::read_to_string(f.path("a/summary.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), checks.len());
    for (row, c) in rows.iter().zip(checks) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0], c["name"].as_str().unwrap());
        assert_eq!(cells[3], c["passed"].to_string());
        assert_eq!(cells[4], c["failed"].to_string());
        assert_eq!(cells[5], c["out_of_domain"].to_string());
        let m = &c["min_margin"];
        let json_margin = if m.is_null() { String::new() } else { m.to_string() };
        assert_eq!(cells[6], json_margin);
    }
}

#[test]
fn report_seed_flag_overrides_config_seed() {
    let f = Fixture::new();
    f.write(
        "cfg.json",
        r#"{"space": "space.json", "family": {"kind": "exponential-tilt", "size": 3}, "suites": ["hlogplus"]}"#,
    );
    let a = f.run(&["--seed", "1", "--out", "a", "report", "--config", "cfg.json"]);
    let b = f.run(&["--seed", "2", "--out", "b", "report", "--config", "cfg.json"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(code(&b), 0);
    let x = fs::read_to_string(f.path("a/report.json")).unwrap();
    let y = fs::read_to_string(f.path("b/report.json")).unwrap();
    assert_ne!(x, y);
    assert!(x.contains("\"seed\": 1"));
}
