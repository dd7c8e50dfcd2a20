//! End-to-end tests through the compiled binary: exit codes, output
//! formats, interval nesting on the packaged dataset, and byte-identical
//! simulate reports across worker counts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ujel() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ujel"))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn stdout_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stdout).unwrap()
}

fn stderr_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stderr).unwrap()
}

#[test]
fn unknown_kernel_exits_2_and_lists_builtins() {
    let data = workspace_root().join("data/synthetic-adni.csv");
    let out = ujel()
        .args(["ci", data.to_str().unwrap(), "--group-col", "group"])
        .args(["--order", "AD,CN,LMCI", "--kernel", "banana"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    let err = stderr_of(&out);
    assert!(err.contains("vus-diff") && err.contains("prob-order"), "{err}");
}

#[test]
fn group_column_without_order_is_refused() {
    let data = workspace_root().join("data/synthetic-adni.csv");
    let out = ujel()
        .args(["estimate", data.to_str().unwrap(), "--group-col", "group"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--order"));
}

#[test]
fn missing_config_file_is_usage_error() {
    let out = ujel().args(["simulate", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_reports_value_and_path() {
    let data = workspace_root().join("data/synthetic-adni.csv");
    let out = ujel()
        .args(["estimate", data.to_str().unwrap(), "--group-col", "group"])
        .args(["--order", "AD,CN,LMCI", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let v: serde_json::Value = serde_json::from_str(stdout_of(&out)).unwrap();
    assert_eq!(v["group_sizes"], serde_json::json!([222, 122, 539]));
    assert_eq!(v["engine"]["path"], "counting");
    assert!(v["estimate"].as_f64().unwrap().abs() <= 1.0);
    assert_eq!(v["meta"]["schema_version"], "1");
    assert!(v["meta"]["config_hash"].as_str().unwrap().len() == 16);
}

#[test]
fn ci_produces_nested_intervals_per_method() {
    let data = workspace_root().join("data/synthetic-adni.csv");
    let out = ujel()
        .args(["ci", data.to_str().unwrap(), "--group-col", "group"])
        .args(["--order", "AD,CN,LMCI", "--format", "json", "--seed", "7"])
        .args(["--level", "0.90,0.95,0.99", "--boot-B", "60", "--workers", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let v: serde_json::Value = serde_json::from_str(stdout_of(&out)).unwrap();
    let intervals = v["intervals"].as_array().unwrap();
    assert_eq!(intervals.len(), 9);
    // Within each method, higher levels must nest the lower ones.
    for chunk in intervals.chunks(3) {
        let (lo, mid, hi) = (&chunk[0], &chunk[1], &chunk[2]);
        assert_eq!(lo["level"], 0.90);
        assert_eq!(hi["level"], 0.99);
        let f = |x: &serde_json::Value, k: &str| x[k].as_f64().unwrap();
        assert!(f(mid, "lower") <= f(lo, "lower") && f(lo, "upper") <= f(mid, "upper"));
        assert!(f(hi, "lower") <= f(mid, "lower") && f(mid, "upper") <= f(hi, "upper"));
    }
    // Diagnostics are part of the stable schema.
    assert!(intervals[0]["diagnostics"]["iterations"].as_u64().is_some());
}

#[test]
fn small_dataset_ci_flags_oracle_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.csv");
    let mut body = String::from("group,a,b\n");
    for g in ["x", "y", "z"] {
        for i in 0..4 {
            body += &format!("{g},{}.{i},{}.{i}\n", i + 1, 9 - i);
        }
    }
    std::fs::write(&path, body).unwrap();
    let out = ujel()
        .args(["ci", path.to_str().unwrap(), "--group-col", "group"])
        .args(["--order", "x,y,z", "--method", "jel,normal", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let v: serde_json::Value = serde_json::from_str(stdout_of(&out)).unwrap();
    let delta = v["engine"]["oracle_check_max_delta"].as_f64().unwrap();
    assert!(delta <= 1e-12, "oracle gap {delta}");
}

#[test]
fn simulate_is_byte_identical_across_worker_counts() {
    let config = workspace_root().join("scenarios/smoke.toml");
    for format in ["csv", "json", "text-table"] {
        let run = |workers: &str| {
            let out = ujel()
                .args(["simulate", config.to_str().unwrap()])
                .args(["--seed", "11", "--reps", "8", "--format", format])
                .args(["--workers", workers])
                .output()
                .unwrap();
            assert!(out.status.success(), "{}", stderr_of(&out));
            out.stdout
        };
        let one = run("1");
        let four = run("4");
        assert_eq!(one, four, "{format} output differs between worker counts");
    }
}

#[test]
fn simulate_csv_embeds_reproducibility_header() {
    let config = workspace_root().join("scenarios/smoke.toml");
    let out = ujel()
        .args(["simulate", config.to_str().unwrap()])
        .args(["--seed", "3", "--reps", "4", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("# schema_version: 1"));
    assert!(text.contains("# seed: 3"));
    assert!(text.contains("# config_hash: "));
    assert!(text.contains("scenario_id,scenario_key,sizes,method"));
    assert!(text.contains("\"(1,1,1;1,1,1;1,1,1)\""));
}

#[test]
fn degenerate_data_is_a_numeric_failure() {
    // Fully separated groups make every kernel value 1: zero spread, no
    // likelihood interval. That is a numeric failure (exit 1), not usage.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sep.csv");
    let mut body = String::from("group,a\n");
    for (g, base) in [("x", 0.0), ("y", 10.0), ("z", 20.0)] {
        for i in 0..4 {
            body += &format!("{g},{}\n", base + i as f64);
        }
    }
    std::fs::write(&path, body).unwrap();
    let out = ujel()
        .args(["ci", path.to_str().unwrap(), "--group-col", "group"])
        .args(["--order", "x,y,z", "--kernel", "vus", "--method", "jel"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("degenerate"));
}

#[test]
fn selftest_passes() {
    let out = ujel().args(["selftest"]).output().unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("selftest: all checks passed"));
}

#[test]
fn multi_file_mode_works() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for (g, base) in [("g1", 0.0), ("g2", 0.4), ("g3", 0.8)] {
        let p = dir.path().join(format!("{g}.csv"));
        let mut body = String::from("m1,m2\n");
        for i in 0..6 {
            body += &format!("{},{}\n", base + i as f64, base + 0.5 * i as f64);
        }
        std::fs::write(&p, body).unwrap();
        paths.push(p);
    }
    let out = ujel()
        .args(["estimate"])
        .args(paths.iter().map(|p| p.to_str().unwrap()))
        .args(["--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("g1/g2/g3"));
}
