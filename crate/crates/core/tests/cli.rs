//! End-to-end tests of the command-line interface: exit codes, report
//! files, and byte-level reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn salopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_salopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const GOOD: &str = r#"
problem = "sphere"
dimension = 1
algorithm = "uniform"
alpha_star = [0.04]
x_star = [0.5]
trials = 40
budget = 2000
seed = 1
"#;

#[test]
fn help_lists_the_subcommands() {
    let out = salopt(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["run", "sweep", "conditions", "theory"] {
        assert!(text.contains(name), "help lacks {name}: {text}");
    }
}

#[test]
fn run_prints_a_summary_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", GOOD);
    let out_dir = dir.path().join("reports");
    let out = salopt(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("experiment summary"));
    assert!(text.contains("level 0.04:"));
    assert!(text.contains("theory reference:"));
    let trials = fs::read_to_string(out_dir.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 41, "header plus one row per trial");
    assert!(out_dir.join("estimates.csv").exists());
    assert!(out_dir.join("summary.txt").exists());
    assert_eq!(
        fs::read_to_string(out_dir.join("summary.txt")).unwrap(),
        text,
        "stdout and summary.txt agree"
    );
}

#[test]
fn unknown_config_key_fails_with_code_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", &format!("{GOOD}\nbudgett = 3\n"));
    let out = salopt(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("budgett"), "stderr lacks the bad key: {err}");
}

#[test]
fn invalid_value_fails_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.toml",
        "problem = \"sphere\"\ndimension = 1\nalgorithm = \"uniform\"\nalpha_star = [2.0]\n",
    );
    let out = salopt(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("outside (0, 1)"));
}

#[test]
fn missing_config_file_fails_with_code_2() {
    let out = salopt(&["run", "--config", "/nonexistent/exp.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unattainable_quantile_exits_3_but_still_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.toml",
        r#"
problem = "sphere"
dimension = 1
algorithm = "uniform"
alpha_star = [0.000001]
x_star = [0.5]
trials = 20
budget = 50
seed = 1
"#,
    );
    let out_dir = dir.path().join("reports");
    let out = salopt(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("unattainable"));
    assert!(out_dir.join("trials.csv").exists(), "reports written before exiting 3");
    assert!(out_dir.join("estimates.csv").exists());
}

#[test]
fn sweep_adds_a_slope_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.toml",
        r#"
problem = "sphere"
dimension = 1
algorithm = "uniform"
alpha_star = [0.09, 0.0225]
x_star = [0.5]
trials = 60
budget = 5000
seed = 2
"#,
    );
    let out_dir = dir.path().join("reports");
    let out = salopt(&["sweep", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("scaling fit"));
    let estimates = fs::read_to_string(out_dir.join("estimates.csv")).unwrap();
    assert!(estimates.lines().any(|l| l.starts_with("slope,uniform,")));
}

#[test]
fn theory_prints_references() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.toml",
        r#"
problem = "sphere"
dimension = 2
algorithm = "sac1"
alpha_star = [0.0625]
x_star = [0.5, 0.5]
"#,
    );
    let out = salopt(&["theory", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("hypothesis class dimension: 3"));
    assert!(text.contains("thresholds: [0.5, 0.25]"));
    assert!(text.contains("uniform quantile:"));
}

#[test]
fn conditions_writes_a_csv_of_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.toml",
        r#"
problem = "sphere"
dimension = 2
algorithm = "sac1"
alpha_star = [0.0625]
x_star = [0.5, 0.5]
diag_runs = 2
mt = 60
mc_samples = 5000
"#,
    );
    let out_dir = dir.path().join("reports");
    let out = salopt(&["conditions", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("run,iteration,alpha,"));
    let csv = fs::read_to_string(out_dir.join("conditions.csv")).unwrap();
    assert_eq!(csv, stdout);
    assert_eq!(csv.lines().count(), 1 + 2 * 2, "two runs of two iterations each");
}

#[test]
fn conditions_rejects_uniform_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", GOOD);
    let out = salopt(&["conditions", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repeat_invocations_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.toml",
        r#"
problem = "sphere"
dimension = 2
algorithm = "sac1"
alpha_star = [0.25, 0.125]
trials = 30
budget = 100000
seed = 9
"#,
    );
    let mut outputs = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "3"), ("c", "1")] {
        let out_dir = dir.path().join(name);
        let out = salopt(&[
            "sweep",
            "--config",
            &cfg,
            "--workers",
            workers,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        let mut bundle = Vec::new();
        for file in ["trials.csv", "estimates.csv", "summary.txt"] {
            bundle.push(fs::read(out_dir.join(file)).unwrap());
        }
        bundle.push(out.stdout);
        outputs.push(bundle);
    }
    assert_eq!(outputs[0], outputs[1], "worker count changed the output");
    assert_eq!(outputs[0], outputs[2], "repeat invocation changed the output");
}

#[test]
fn seed_override_changes_trials() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", GOOD);
    let dir_a = dir.path().join("a");
    let dir_b = dir.path().join("b");
    let a = salopt(&["run", "--config", &cfg, "--out", dir_a.to_str().unwrap()]);
    let b = salopt(&["run", "--config", &cfg, "--seed", "77", "--out", dir_b.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let ta = fs::read_to_string(dir_a.join("trials.csv")).unwrap();
    let tb = fs::read_to_string(dir_b.join("trials.csv")).unwrap();
    assert_ne!(ta, tb, "different seeds produced identical trials");
}
