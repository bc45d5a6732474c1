//! Command-line behaviour: exit codes, output files and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use capres::cli::config::{Experiment, ExperimentConfig};
use capres::cli::output::CSV_COLUMNS;

fn capres(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_capres"));
    cmd.args(args).env_remove("CAPRES_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("the binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(experiment: &str, config: &Path, out: &Path) -> Output {
    capres(
        &[experiment, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[],
    )
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn integer_shift_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "l3.toml", "L = 3.0\n");
    for exp in ["sl2-model", "sl2-endtoend", "resonance-scan"] {
        let o = run(exp, &cfg, &dir.path().join("out"));
        assert_eq!(o.status.code(), Some(2), "{exp}");
        assert!(stderr(&o).contains("non-integer"), "{exp}: {}", stderr(&o));
    }
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let top = write_config(dir.path(), "a.toml", "lamda_cutoff = 40.0\n");
    let nested = write_config(dir.path(), "b.toml", "[model]\ntails = 1e-5\n");
    for cfg in [top, nested] {
        let o = run("sl2-model", &cfg, &dir.path().join("out"));
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains("unknown field"), "{}", stderr(&o));
    }
}

#[test]
fn malformed_inputs_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("missing.toml");
    assert_eq!(run("o11-rep", &missing, &out).status.code(), Some(2));
    let mismatch = write_config(dir.path(), "m.toml", "experiment = \"weil-check\"\n");
    let o = run("o11-rep", &mismatch, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("weil-check"));
    let bad_p = write_config(dir.path(), "p.toml", "p = 3\n");
    assert_eq!(run("sl2-endtoend", &bad_p, &out).status.code(), Some(2));
    let small_n = write_config(dir.path(), "n.toml", "L = 0.5\n");
    assert_eq!(run("o11-resonance", &small_n, &out).status.code(), Some(2));
    let syntax = write_config(dir.path(), "s.toml", "k_max = \n");
    assert_eq!(run("o11-rep", &syntax, &out).status.code(), Some(2));
    let empty = write_config(dir.path(), "e.toml", "");
    let o = capres(&["bogus-experiment", "--config", empty.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists(), "no output is written for invalid configurations");
}

#[test]
fn invalid_thread_cap_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "");
    let out = dir.path().join("out");
    for bad in ["0", "many"] {
        let o = capres(
            &["capelli-check", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
            &[("CAPRES_THREADS", bad)],
        );
        assert_eq!(o.status.code(), Some(2), "CAPRES_THREADS={bad}");
        assert!(stderr(&o).contains("CAPRES_THREADS"));
    }
    let o = capres(
        &["capelli-check", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[("CAPRES_THREADS", "1")],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn passing_run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "experiment = \"capelli-check\"\n");
    let out = dir.path().join("out");
    let o = run("capelli-check", &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("capelli-check.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 10);
    for row in &rows {
        let prov = row.rsplit(',').next().unwrap();
        assert!(["paper", "trivial", "derived"].contains(&prov), "{row}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("capelli-check.json")).unwrap()).unwrap();
    assert_eq!(json["experiment"], "capelli-check");
    assert_eq!(json["passed"], true);
    assert_eq!(json["records"].as_array().unwrap().len(), rows.len());
}

#[test]
fn failing_assertions_exit_with_one() {
    // Θ²(s) under the displayed determinant formula is i/4, not 1/4.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "w.toml", "");
    let out = dir.path().join("out");
    let o = run("weil-check", &cfg, &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("theta_squared(s)"));
    assert!(out.join("weil-check.csv").exists(), "tables are written even on failure");
}

#[test]
fn output_is_byte_identical_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d.toml", "timing = false\nseed = 7\n");
    let out = dir.path().join("out");
    let read = |exp: &str| {
        ["csv", "json"].map(|ext| fs::read(out.join(format!("{exp}.{ext}"))).unwrap())
    };
    for exp in ["o11-rep", "capelli-check"] {
        assert_eq!(run(exp, &cfg, &out).status.code(), Some(0));
        let first = read(exp);
        assert_eq!(run(exp, &cfg, &out).status.code(), Some(0));
        assert_eq!(first, read(exp), "{exp}");
    }
}

#[test]
fn seed_flag_overrides_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", "timing = false\nseed = 7\n");
    let out = dir.path().join("out");
    let o = capres(
        &["capelli-check", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "11"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("capelli-check.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 11);
}

#[test]
fn shipped_configs_are_valid() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for exp in Experiment::ALL {
        let path = root.join(format!("{}.toml", exp.name()));
        let cfg = ExperimentConfig::load(exp, &path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(cfg.experiment, exp);
    }
}

#[test]
fn defaults_are_valid_for_every_experiment() {
    for exp in Experiment::ALL {
        ExperimentConfig::defaults(exp).validate().unwrap();
        assert_eq!(ExperimentConfig::from_toml(exp, "").unwrap(), ExperimentConfig::defaults(exp));
    }
}
