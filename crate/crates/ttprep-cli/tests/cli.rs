use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ttprep");

const CFG: &str = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 5

[cross]
max_rank = 8
seed = 3

[simulate]
shots = 200
seed = 4
"#;

fn write_cfg(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = run_cli(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_reports_the_cross_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), CFG);
    let out = run_cli(&["fit", "--config", cfg.to_str().unwrap(), "--no-timing"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["d_total"], 5);
    assert!(doc["function_evaluations"].as_u64().unwrap() > 0);
    assert!(doc["final_validation_error"].as_f64().unwrap() >= 0.0);
    assert!(doc["ranks"].as_array().unwrap().len() == 6);
    assert_eq!(doc["wall_time_ms"], 0.0);
}

#[test]
fn compile_summarizes_the_plan() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), CFG);
    let out = run_cli(&["compile", "--config", cfg.to_str().unwrap(), "--no-timing"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["num_qubits"], 5);
    assert_eq!(doc["gate_count"], 5);
    assert!(doc["normalizer"].as_f64().unwrap() > 0.0);
    assert!(doc["max_gate_width"].as_u64().unwrap() <= 4);
}

#[test]
fn simulate_emits_metrics_and_a_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), CFG);
    let out = run_cli(&["simulate", "--config", cfg.to_str().unwrap(), "--no-timing"]);
    let doc = stdout_json(&out);
    assert!(doc["row"]["fidelity"].as_f64().unwrap() >= 0.999);
    assert!(doc["row"]["ks"].as_f64().unwrap() <= 1e-2);
    let hist = doc["histogram"].as_object().unwrap();
    let total: u64 = hist.values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 200);
    for key in hist.keys() {
        assert_eq!(key.len(), 5);
        assert!(key.chars().all(|c| c == '0' || c == '1'));
    }
}

#[test]
fn bench_writes_a_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        &format!("{CFG}\n[sweep]\nqubits = [4, 5]\nrepeats = 1\n"),
    );
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out_path in [&out_a, &out_b] {
        let out = run_cli(&[
            "bench",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
            "--format",
            "csv",
            "--no-timing",
        ]);
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same config and seed must give identical bytes");

    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("d_total,"));
}

#[test]
fn bench_json_format_is_selectable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        &format!("{CFG}\n[sweep]\nqubits = [4]\nrepeats = 1\n"),
    );
    let out = run_cli(&[
        "bench",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--no-timing",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc.as_array().unwrap().len(), 1);
    assert_eq!(doc[0]["qubits_per_dim"], 4);
}

#[test]
fn export_then_import_check_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), CFG);
    let circuit = dir.path().join("circuit.json");
    let out = run_cli(&[
        "export",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        circuit.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(circuit.exists());

    let out = run_cli(&["import-check", circuit.to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["num_qubits"], 5);
    assert_eq!(doc["gate_count"], 5);
}

#[test]
fn export_requires_an_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), CFG);
    let out = run_cli(&["export", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn import_check_flags_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"num_qubits": 2, "normalizer": 1.0, "gates": []}"#).unwrap();
    let out = run_cli(&["import-check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bit_convention"), "{stderr}");
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), &format!("{CFG}\nnot_a_key = 1\n"));
    let out = run_cli(&["fit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not_a_key"), "{stderr}");
}

#[test]
fn missing_config_file_exits_with_code_four() {
    let out = run_cli(&["fit", "--config", "/nonexistent/nowhere.toml"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn numeric_failures_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    // a 64-qubit request passes config checks but overflows the pipeline
    let cfg = write_cfg(
        dir.path(),
        r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 64
"#,
    );
    let out = run_cli(&["fit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_flag_overrides_config_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), &format!("{CFG}\n[sweep]\nqubits = [4]\nrepeats = 1\n"));
    let run_with = |seed: Option<&str>| -> serde_json::Value {
        let mut args = vec![
            "bench",
            "--config",
            cfg.to_str().unwrap(),
            "--format",
            "json",
            "--no-timing",
        ];
        if let Some(s) = seed {
            args.push("--seed");
            args.push(s);
        }
        stdout_json(&run_cli(&args))
    };
    let base = run_with(None);
    let moved = run_with(Some("991"));
    assert_ne!(base[0]["seed"], moved[0]["seed"]);
}
