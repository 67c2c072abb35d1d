//! End-to-end runs of the `fracspec` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracspec"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn ml_eval_values() {
    let o = bin().args(["ml-eval", "1", "1", "-1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.36787944117144233");

    let o = bin().args(["ml-eval", "0.5", "1", "-1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    let exact = 0.427_583_576_155_807_f64;
    assert!((v - exact).abs() <= 2.0 * f64::EPSILON * exact, "{v}");
}

#[test]
fn ml_eval_usage_errors() {
    let o = bin().args(["ml-eval", "0.5", "0", "-1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("beta must be positive"),
        "{}",
        stderr(&o)
    );

    let o = bin().args(["ml-eval", "0.5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().args(["ml-eval", "1.5", "1", "-1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn homogeneous_run_writes_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
            "problem": {"alpha": 0.5, "length": "pi", "horizon": 1, "u0": "sin(x)",
                        "n_modes": 16, "grid_size": 401, "n_time_steps": 128},
            "snapshots": [0, 0.5, 1],
            "checks": ["maximum_principle", "minimum_principle", "residual"],
            "output_dir": "out"
        }"#,
    );
    let o = bin()
        .args(["solve", "--quiet", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).is_empty());
    let out = dir.path().join("out");
    for f in [
        "snapshot_t0.csv",
        "snapshot_t0.5.csv",
        "snapshot_t1.csv",
        "modes.csv",
        "checks.jsonl",
        "summary.txt",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let snap = std::fs::read_to_string(out.join("snapshot_t0.5.csv")).unwrap();
    assert!(snap.starts_with("x,u\n0,0\n"));
    assert_eq!(snap.lines().count(), 102);
    let modes = std::fs::read_to_string(out.join("modes.csv")).unwrap();
    assert!(modes.starts_with("i,lambda_i,c_i,T_i(T)\n1,"));
    assert_eq!(modes.lines().count(), 17);

    let checks = std::fs::read_to_string(out.join("checks.jsonl")).unwrap();
    let names: Vec<String> = checks
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["name"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(
        names,
        ["maximum_principle", "minimum_principle", "residual"]
    );

    // defaults are echoed
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    for line in [
        "problem.p = 1",
        "problem.q = 0",
        "problem.phi1 = 0",
        "sampling.nx = 41",
        "residual.t_min = 0.078125",
    ] {
        assert!(
            summary.lines().any(|l| l == line),
            "missing {line:?} in\n{summary}"
        );
    }
}

#[test]
fn negative_p_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"problem": {"alpha": 0.5, "length": 1, "horizon": 1, "p": "-1"}}"#,
    );
    let o = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("problem.p") && err.contains("p(x) > 0"),
        "{err}"
    );
}

#[test]
fn syntax_errors_report_key_and_offset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"problem": {"alpha": 0.5, "length": 1, "horizon": 1, "source": "x*(t+"}}"#,
    );
    let o = bin()
        .args(["check", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("problem.source") && err.contains("byte 5"),
        "{err}"
    );

    let cfg = write_config(
        dir.path(),
        r#"{"problem": {"alpha": 0.5, "length": 1, "horizon": 1}, "snapshot": [0]}"#,
    );
    let o = bin()
        .args(["check", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("snapshot"), "{}", stderr(&o));

    let o = bin()
        .args(["solve", "--config", "/nonexistent/run.json"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn violated_stability_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["check", "--config"])
        .arg(configs().join("stability_violation.json"))
        .arg("--output")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("FAIL stability"));
    let checks = std::fs::read_to_string(dir.path().join("checks.jsonl")).unwrap();
    let v: serde_json::Value = serde_json::from_str(checks.lines().next().unwrap()).unwrap();
    assert_eq!(v["passed"], false);
    assert!(!dir.path().join("modes.csv").exists());
}

#[test]
fn overrides_and_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("FRACSPEC_THREADS", "2")
        .args([
            "check",
            "--quiet",
            "--modes",
            "8",
            "--time-steps",
            "64",
            "--config",
        ])
        .arg(configs().join("stability_violation.json"))
        .arg("--output")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("problem.n_modes = 8"));
    assert!(summary.contains("problem.n_time_steps = 64"));
    assert!(summary.contains("threads = 2"));

    let o = bin()
        .env("FRACSPEC_THREADS", "many")
        .args(["check", "--config"])
        .arg(configs().join("stability_violation.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FRACSPEC_THREADS"));
}

#[test]
fn eigen_export() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"problem": {"alpha": 0.5, "length": 1, "horizon": 1, "p": "1+x", "n_modes": 4, "grid_size": 41},
            "output_dir": "out"}"#,
    );
    let o = bin()
        .args(["eigen", "--quiet", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let path = dir.path().join("out/eigen.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..3], ["i", "lambda_i", "0"]);
    assert_eq!(header.len(), 2 + 41);
    assert_eq!(lines.count(), 4);
    let sys = fracspec::io::read_eigen(&path).unwrap();
    assert_eq!(sys.n_modes(), 4);
    assert!(sys.lambdas().windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn eigen_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"problem": {"alpha": 0.5, "length": 1, "horizon": 1, "u0": "sin(pi*x)",
                   "n_modes": 8, "grid_size": 201, "n_time_steps": 32},
                   "snapshots": [1], "output_dir": "out", "eigen_cache": "eigen_cache.csv"}"#;
    let cfg = write_config(dir.path(), body);
    let run = || {
        let o = bin()
            .args(["solve", "--quiet", "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(dir.path().join("out/snapshot_t1.csv")).unwrap()
    };
    let first = run();
    assert!(dir.path().join("eigen_cache.csv").is_file());
    assert_eq!(run(), first);

    // a cache built for other coefficients is detected and replaced
    let other = body.replace(r#""u0""#, r#""p": "2", "u0""#);
    write_config(dir.path(), &other);
    let o = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("does not match"), "{}", stderr(&o));
}
