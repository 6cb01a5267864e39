//! End-to-end runs of the `frsim` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SCENARIO: &str = r#"
duration = 400
seed = 3

[inputs.load]
sigma = 20.0

[[facility]]
name = "bess"
preset = "bess-table1"
pc = 15.0
e_cap = 30.0
"#;

fn frsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frsim")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = frsim(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = frsim(args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn scenario(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn s(p: &Path) -> String {
    p.display().to_string()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

fn ace_rmse(dir: &Path) -> f64 {
    let text = std::fs::read_to_string(dir.join("metrics.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["ace"]["rmse"].as_f64().unwrap()
}

#[test]
fn validate_config_prints_resolved_toml() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.toml", SCENARIO);
    let text = ok(&["validate-config", "--config", &cfg]);
    assert!(text.contains("kind = \"bess\""));
    assert!(text.contains("cf1_c = 0.014"));

    let missing = s(&dir.path().join("nope.toml"));
    let (c, err) = code(&["validate-config", "--config", &missing]);
    assert_eq!(c, 1);
    assert!(err.contains("nope.toml"), "{err}");

    let (c, err) = code(&["validate-config", "--config", &cfg, "--set", "facility.bess.typo=1"]);
    assert_eq!(c, 1, "{err}");
    let bad = scenario(dir.path(), "bad.toml", "duration = 10\n[delays]\nsr_to_tg = -1.0\n");
    assert_eq!(code(&["validate-config", "--config", &bad]).0, 1);
    assert_eq!(code(&["no-such-verb"]).0, 1);
}

#[test]
fn simulate_writes_result_directory() {
    let dir = tempfile::tempdir().unwrap();
    let flat = scenario(
        dir.path(),
        "flat.toml",
        &format!("{}\n[inputs]\nime = 0.0\n", SCENARIO.replace("sigma = 20.0", "sigma = 0.0")),
    );
    let out = dir.path().join("flat");
    ok(&["simulate", "--config", &flat, "--out", &s(&out)]);
    for f in ["result.csv", "metrics.json", "config.toml", "events.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(ace_rmse(&out), 0.0);
    assert!(column(&out.join("result.csv"), "f_a").iter().all(|&f| f == 60.0));

    let cfg = scenario(dir.path(), "s.toml", SCENARIO);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["simulate", "--config", &cfg, "--out", &s(&a)]);
    ok(&["simulate", "--config", &cfg, "--out", &s(&b)]);
    for f in ["result.csv", "metrics.json", "config.toml", "events.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn override_shifts_governor_response() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(
        dir.path(),
        "s.toml",
        &format!(
            "{}\n[inputs]\nime = 0.0\n[[inputs.load.ramps]]\nstart = 50\nduration = 1\ndelta = 40.0\n",
            SCENARIO.replace("sigma = 20.0", "sigma = 0.0")
        ),
    );
    let first_move = |out: &PathBuf| {
        let v = column(&out.join("result.csv"), "ptgr");
        v.iter().position(|&x| x != v[0]).unwrap()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["simulate", "--config", &cfg, "--out", &s(&a)]);
    ok(&["simulate", "--config", &cfg, "--out", &s(&b), "--set", "delays.sr_to_tg=0"]);
    assert_eq!(first_move(&a), first_move(&b) + 4);
}

#[test]
fn sweep_delays_rounds_and_rejects_negative() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.toml", SCENARIO);
    let out = dir.path().join("sweep");
    ok(&["sweep-delays", "--config", &cfg, "--out", &s(&out), "--factors", "1,0.5,0"]);
    let csv = out.join("sweep_delays.csv");
    assert_eq!(column(&csv, "measurement_to_cc"), vec![4.0, 2.0, 0.0]);
    assert_eq!(column(&csv, "cd_tg"), vec![30.0, 15.0, 0.0]);
    let rmse = column(&csv, "rmse");
    assert!(rmse[0] > rmse[2]);

    let (c, _) = code(&["sweep-delays", "--config", &cfg, "--out", &s(&out), "--factors", "1,-0.5"]);
    assert_eq!(c, 1);
}

#[test]
fn sweep_ess_rows_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.toml", SCENARIO);
    let out = dir.path().join("ess");
    ok(&[
        "sweep-ess", "--config", &cfg, "--out", &s(&out), "--spec", "bess:15/30", "--spec",
        "bess:40/80", "--soc", "both",
    ]);
    let text = std::fs::read_to_string(out.join("sweep_ess.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert_eq!(column(&out.join("sweep_ess.csv"), "rmse").len(), 4);

    for spec in ["bess:0/30", "bess:-15/30", "bess:15"] {
        let (c, _) = code(&["sweep-ess", "--config", &cfg, "--out", &s(&out), "--spec", spec]);
        assert_eq!(c, 1, "{spec}");
    }
}

#[test]
fn metrics_and_histogram_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.toml", SCENARIO);
    let run = dir.path().join("run");
    ok(&["simulate", "--config", &cfg, "--out", &s(&run)]);
    let result = run.join("result.csv");

    let text = ok(&["metrics", "--input", &s(&result), "--signal", "ace"]);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let rmse: f64 = fields[1].parse().unwrap();
    assert!((rmse - ace_rmse(&run)).abs() <= 1e-12 * rmse.max(1.0));

    let text = ok(&["metrics", "--input", &s(&result), "--signal", "ace", "--reference", &s(&result)]);
    assert!(text.contains("ace,0,0,400"), "{text}");
    let (c, _) = code(&["metrics", "--input", &s(&result), "--signal", "missing"]);
    assert_eq!(c, 1);

    let hist = dir.path().join("hist");
    ok(&["histogram", "--input", &s(&result), "--signal", "ace", "--bin-width", "10", "--out", &s(&hist)]);
    let counts = column(&hist.join("histogram_ace.csv"), "count");
    assert_eq!(counts.iter().sum::<f64>(), 400.0);
    let (c, _) = code(&[
        "histogram", "--input", &s(&result), "--signal", "ace", "--bin-width", "0", "--out", &s(&hist),
    ]);
    assert_eq!(c, 1);
}

#[test]
fn fit_recovers_recorded_gain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.toml", SCENARIO);
    let run = dir.path().join("run");
    ok(&["simulate", "--config", &cfg, "--out", &s(&run)]);
    let spec = scenario(
        dir.path(),
        "fit.toml",
        r#"
scenario = "s.toml"
target = "run/result.csv"
signal = "sr"

[optimizer]
max_evals = 120

[[parameter]]
name = "agc.kp"
lower = 0.1
upper = 1.0
"#,
    );
    let out = dir.path().join("fit");
    ok(&["fit", "--spec", &spec, "--out", &s(&out)]);
    let kp = column(&out.join("fit.csv"), "value")[0];
    assert!((kp - 0.42).abs() < 1e-3, "kp {kp}");
    let trace = column(&out.join("fit_trace.csv"), "best_objective");
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn runtime_abort_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut trace = String::from("step,pd,pgt,ni_s,ime\n");
    for t in 0..20 {
        let big = if t == 7 { "1.7e308" } else { "0" };
        trace.push_str(&format!("{t},15000,15000,{big},{big}\n"));
    }
    std::fs::write(dir.path().join("trace.csv"), trace).unwrap();
    let cfg = scenario(dir.path(), "s.toml", "duration = 20\n[inputs]\ntrace = \"trace.csv\"\n");
    let (c, err) = code(&["simulate", "--config", &cfg, "--out", &s(&dir.path().join("o"))]);
    assert_eq!(c, 2, "{err}");
    assert!(err.contains("step 7"), "{err}");
}
