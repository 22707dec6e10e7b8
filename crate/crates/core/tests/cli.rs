use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_divbar");

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("model.toml");
    std::fs::write(&p, text).unwrap();
    p
}

const UNCERTIFIED: &str = r#"
schema = 1
[model]
c = 3.0
sigma = 0.0
lambda = 1.0
[compounder]
kind = "explicit_pmf"
probs = [0.5, 0.4, 0.1]
tail_bound = 0.0
[claims]
kind = "erlang"
shape = 3
rate = 2.0
[control]
q = 0.1
"#;

#[test]
fn scale_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let cfg = config("classical.toml");
    let o = run(&[
        "scale",
        "--config",
        cfg.to_str().unwrap(),
        "--grid-n",
        "128",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,W,W1,W2,err"));
    assert_eq!(lines.count(), 129);
}

#[test]
fn optimize_reports_the_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = config("classical.toml");
    let o = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("rule=Thm4.1"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["certificate"]["rule"], "Thm4.1");
    let b = report["b_star"].as_f64().unwrap();
    assert!((b - 4.21407).abs() < 1e-5, "{b}");
    let table = dir.path().join("report.values.csv");
    assert!(std::fs::read_to_string(table).unwrap().starts_with("x,V\n"));
}

#[test]
fn optimize_without_a_rule_says_so() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), UNCERTIFIED);
    let out = dir.path().join("r.json");
    let o = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("barrier-optimal on grid only"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["certificate"]["rule"], "None");
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), &UNCERTIFIED.replace("sigma = 0.0", "sigma = -1.0"));
    let o = run(&["optimize", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.sigma"));

    let unknown = write_config(dir.path(), &UNCERTIFIED.replace("q = 0.1", "q = 0.1\nspeed = 2"));
    let o = run(&["optimize", "--config", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("speed"));

    // no [simulate] section
    let cfg = config("logarithmic_hyperexp.toml");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["optimize", "--config", "/nonexistent/model.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn short_grid_exits_with_three() {
    let cfg = config("classical.toml");
    let o = run(&["optimize", "--config", cfg.to_str().unwrap(), "--xmax", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("x_max"));
}

#[test]
fn simulate_agrees_with_the_formula() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("classical.toml"))
        .unwrap()
        .replace("replications = 100000", "replications = 20000");
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("sim.json");
    let o = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r["z"].as_f64().unwrap().abs() < 4.0);
    assert_eq!(r["b_is_optimal"], true);
}

#[test]
fn pmf_and_shapes_run() {
    let cfg = config("logarithmic_hyperexp.toml");
    let o = run(&["pmf", "--config", cfg.to_str().unwrap(), "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,p,p_series"));
    assert_eq!(text.lines().count(), 7);

    let o = run(&["check-shapes", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["compounder"].as_array().unwrap().len(), 4);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("jump_diffusion.toml");
    let out = dir.path().join("r.json");
    let mut seen = Vec::new();
    for _ in 0..2 {
        let o = run(&[
            "optimize",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        seen.push((
            std::fs::read(&out).unwrap(),
            std::fs::read(dir.path().join("r.values.csv")).unwrap(),
        ));
    }
    assert_eq!(seen[0], seen[1]);
}
