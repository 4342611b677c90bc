use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

use emtauc_cli::manifest::{RunManifest, MANIFEST_SCHEMA};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn emtauc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emtauc"))
        .args(args)
        .env_remove("EMTAUC_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// 24 instances, separable on feature 1 with a wide margin; feature 2 is
/// small noise. Meant to be used unscaled.
fn toy_file(dir: &Path) -> PathBuf {
    let mut s = String::new();
    for i in 0..24 {
        let label = if i % 2 == 0 { "+1" } else { "-1" };
        let x = if i % 2 == 0 { 0.5 + i as f64 / 48.0 } else { -0.5 - i as f64 / 48.0 };
        s.push_str(&format!("{label} 1:{x} 2:{}\n", (i % 5) as f64 / 50.0 - 0.04));
    }
    let p = dir.join("toy");
    fs::write(&p, s).unwrap();
    p
}

fn validate_schema(v: &Value) {
    let schema: Value = serde_json::from_str(MANIFEST_SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    panic!("manifest violates schema: {msgs:?}");
}

#[test]
fn run_writes_manifest_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_json(
        dir.path(),
        "run.json",
        &json!({"dataset_path": data("diabetes"), "solver": {"kind": "mfea"}, "env": {"trace_stride": 10}}),
    );
    let out = dir.path().join("out");
    let o = emtauc(&["run", &cfg, "--seed", "3", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let text = fs::read_to_string(out.join("manifest.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    validate_schema(&v);
    let m: RunManifest = serde_json::from_value(v.clone()).unwrap();
    let r = m.result.unwrap();
    assert!(r.spent >= 101_000.0 && r.spent <= 101_100.0, "spent {}", r.spent);
    assert!(!r.adjustments.is_empty());
    assert_eq!(m.seed, 3);
    // Every config key is echoed, defaults included.
    for key in ["dataset_path", "test_path", "scale", "seed", "output_dir", "env", "solver"] {
        assert!(v["config"].get(key).is_some(), "missing {key}");
    }
    for key in ["sampling_rate", "lambda", "delta", "budget", "trace_stride"] {
        assert!(v["config"]["env"].get(key).is_some(), "missing env.{key}");
    }
    assert_eq!(v["config"]["solver"]["pop_size"], 20);

    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(
        lines.next().unwrap(),
        "generation,cumulative_cost,best_objective_expensive,best_auc_expensive,best_objective_cheap,adjust_event"
    );
    let costs: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(costs.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*costs.last().unwrap(), r.spent);
}

#[test]
fn rerun_from_manifest_reproduces_objective() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_json(
        dir.path(),
        "run.json",
        &json!({"dataset_path": data("sonar"), "solver": {"kind": "emea"}, "env": {"budget": 20000}}),
    );
    let a = dir.path().join("a");
    assert_eq!(code(&emtauc(&["run", &cfg, "--seed", "5", "--output-dir", a.to_str().unwrap()])), 0);
    let m: RunManifest = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();

    let echo = write_json(dir.path(), "echo.json", &m.config);
    let b = dir.path().join("b");
    let seed = m.seed.to_string();
    assert_eq!(code(&emtauc(&["run", &echo, "--seed", &seed, "--output-dir", b.to_str().unwrap()])), 0);
    let m2: RunManifest = serde_json::from_str(&fs::read_to_string(b.join("manifest.json")).unwrap()).unwrap();
    let (r1, r2) = (m.result.unwrap(), m2.result.unwrap());
    assert_eq!(r1.best_objective, r2.best_objective);
    assert_eq!(r1.weights, r2.weights);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let missing = write_json(dir.path(), "missing.json", &json!({"dataset_path": "nope", "solver": {"kind": "mfea"}}));
    let o = emtauc(&["run", &missing, "--seed", "1", "--output-dir", out]);
    assert_eq!(code(&o), 3);
    assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);

    let unknown = write_json(
        dir.path(),
        "unknown.json",
        &json!({"dataset_path": data("sonar"), "solver": {"kind": "mfea"}, "budgett": 5}),
    );
    assert_eq!(code(&emtauc(&["run", &unknown, "--seed", "1", "--output-dir", out])), 2);
    assert_eq!(code(&emtauc(&["validate-config", &unknown])), 2);

    let ok = write_json(dir.path(), "ok.json", &json!({"dataset_path": data("sonar"), "solver": {"kind": "mfea"}}));
    assert_eq!(code(&emtauc(&["validate-config", &ok])), 0);
    // Seed is mandatory for run.
    assert_eq!(code(&emtauc(&["run", &ok, "--output-dir", out])), 2);
    assert_eq!(code(&emtauc(&["run", &ok, "--seed", "1", "--sampling-rate", "0"])), 2);
    assert_eq!(code(&emtauc(&["--jobs", "0", "run", &ok, "--seed", "1", "--output-dir", out])), 2);
    // No output directory anywhere.
    assert_eq!(code(&emtauc(&["run", &ok, "--seed", "1"])), 2);

    let bad = dir.path().join("bad");
    fs::write(&bad, "+1 1:0.5\n-1 2:x\n").unwrap();
    let bad_cfg = write_json(dir.path(), "bad.json", &json!({"dataset_path": bad, "solver": {"kind": "mfea"}}));
    assert_eq!(code(&emtauc(&["run", &bad_cfg, "--seed", "1", "--output-dir", out])), 3);

    let one_class = dir.path().join("one");
    fs::write(&one_class, "+1 1:0.5\n+1 2:1\n").unwrap();
    let cfg = write_json(dir.path(), "one.json", &json!({"dataset_path": one_class, "solver": {"kind": "mfea"}}));
    assert_eq!(code(&emtauc(&["run", &cfg, "--seed", "1", "--output-dir", out])), 3);
}

#[test]
fn output_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_json(
        dir.path(),
        "l.json",
        &json!({"dataset_path": data("sonar"), "n_points": 50, "n_repeats": 2}),
    );
    let out = dir.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_emtauc"))
        .args(["landscape", &cfg])
        .env("EMTAUC_OUTPUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(out.join("landscape.csv").exists());
}

#[test]
fn benchmark_layout_and_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let toy = toy_file(dir.path());
    let cfg = write_json(
        dir.path(),
        "bench.json",
        &json!({
            "datasets": [{"name": "toy", "path": toy}, {"name": "toy2", "path": toy}],
            "solvers": [
                {"name": "ga", "solver": {"kind": "single_task_ga"}, "env": {"budget": 2000, "sampling_rate": 0.5}},
                {"name": "mfea", "solver": {"kind": "mfea"}, "env": {"budget": 2000, "sampling_rate": 0.5}}
            ],
            "trials": 1, "folds": 2, "baseline": "ga", "scale": false
        }),
    );
    let out = dir.path().join("out");
    let o = emtauc(&["benchmark", &cfg, "--seed", "8", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let cells: Vec<_> = fs::read_dir(out.join("cells")).unwrap().collect();
    assert_eq!(cells.len(), 8);
    for c in cells {
        let text = fs::read_to_string(c.unwrap().path().join("manifest.json")).unwrap();
        validate_schema(&serde_json::from_str(&text).unwrap());
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let rows: Vec<Vec<&str>> = summary.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(summary.lines().next().unwrap(), "dataset,solver,mean_auc,std_auc,n,failures,verdict");
    assert_eq!(rows.len(), 4);
    for r in &rows {
        // The toy set is separable: every run reaches AUC 1 on held-out data.
        assert_eq!(r[2], "1", "{r:?}");
        assert_eq!(r[4], "2");
        assert_eq!(r[5], "0");
    }
    // Two runs are too few for a rank-sum verdict.
    assert!(rows.iter().all(|r| r[6].is_empty()));

    let cfg5 = write_json(
        dir.path(),
        "bench5.json",
        &json!({
            "datasets": [{"name": "toy", "path": toy}],
            "solvers": [{"name": "ga", "solver": {"kind": "single_task_ga"}, "env": {"budget": 1000, "sampling_rate": 0.5}}],
            "trials": 1, "folds": 5, "baseline": "ga"
        }),
    );
    let out5 = dir.path().join("out5");
    assert_eq!(code(&emtauc(&["benchmark", &cfg5, "--seed", "8", "--output-dir", out5.to_str().unwrap()])), 0);
    let summary = fs::read_to_string(out5.join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().ends_with(",5,0,≈"), "{summary}");
}

#[test]
fn benchmark_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_json(
        dir.path(),
        "bench.json",
        &json!({
            "datasets": [{"name": "sonar", "path": data("sonar")}],
            "solvers": [{"name": "emea", "solver": {"kind": "emea"}, "env": {"budget": 5000}}],
            "trials": 1, "folds": 3
        }),
    );
    let run = |jobs: &str, name: &str| {
        let out = dir.path().join(name);
        let o = emtauc(&["--jobs", jobs, "benchmark", &cfg, "--seed", "2", "--output-dir", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        out
    };
    let (a, b) = (run("1", "a"), run("3", "b"));
    assert_eq!(
        fs::read(a.join("summary.csv")).unwrap(),
        fs::read(b.join("summary.csv")).unwrap()
    );
    let cell = "cells/sonar__emea__t0_f1/trace.csv";
    assert_eq!(fs::read(a.join(cell)).unwrap(), fs::read(b.join(cell)).unwrap());
}

#[test]
fn landscape_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_json(
        dir.path(),
        "l.json",
        &json!({"dataset_path": data("australian"), "sampling_rate": 1.0, "n_points": 100, "n_repeats": 3}),
    );
    let out = dir.path().join("out");
    assert_eq!(code(&emtauc(&["landscape", &cfg, "--output-dir", out.to_str().unwrap()])), 0);
    let csv = fs::read_to_string(out.join("landscape.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines, ["repeat,rho,variance", "0,1,", "1,1,", "2,1,", "mean,1,0"]);

    assert_eq!(
        code(&emtauc(&["landscape", &cfg, "--n-repeats", "0", "--output-dir", out.to_str().unwrap()])),
        2
    );
}

#[test]
fn costmodel_theoretical_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = emtauc(&[
        "costmodel",
        "--dataset",
        data("sonar").to_str().unwrap(),
        "--rates",
        "0.1,0.5,1.0",
        "--repetitions",
        "3",
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("costmodel.csv")).unwrap();
    let theo: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(theo, ["1", "25", "100"]);
    assert!(csv.lines().nth(1).unwrap().ends_with(",1.000"));
    assert_eq!(
        code(&emtauc(&["costmodel", "--dataset", "x", "--rates", "1.5", "--output-dir", "y"])),
        2
    );
}
