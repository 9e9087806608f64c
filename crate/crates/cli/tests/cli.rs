use std::path::Path;
use std::process::{Command, Output};

fn hitrun(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitrun"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("NCW_SEED")
        .output()
        .unwrap()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn help_lists_subcommands() {
    let out = Command::new(env!("CARGO_BIN_EXE_hitrun"))
        .arg("--help")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["sample", "plan", "bench", "check", "map"] {
        assert!(text.contains(sub), "missing {sub}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["plan", "--algo", "nope"][..],
        &["plan", "--map", "spiral", "--width", "0"],
        &["map", "--gen", "ball"],
        &["check", "--trials", "0"],
        &["--jobs", "0", "bench", "--runs", "1"],
    ] {
        let out = hitrun(dir.path(), args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn plan_is_deterministic_and_reports_success() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "--seed", "7", "plan", "--algo", "hnr", "--map", "spiral", "--width", "1.2",
    ];
    assert!(hitrun(a.path(), &args).status.success());
    assert!(hitrun(b.path(), &args).status.success());
    for f in ["report.json", "trace.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap()
        );
    }
    let r = report(a.path());
    assert_eq!(r["success"], true);
    assert!(r["wall_time_ms"].is_null());
}

#[test]
fn lemma_suite_reports_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = hitrun(dir.path(), &["--seed", "1", "check", "--suite", "lemmas"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let reports = report(dir.path());
    for r in reports.as_array().unwrap() {
        assert_eq!(r["violations"], 0, "{r}");
    }
}

#[test]
fn spiral_bench_summary_has_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = hitrun(
        dir.path(),
        &[
            "--seed",
            "1",
            "bench",
            "--experiment",
            "spiral",
            "--widths",
            "1.2",
            "--runs",
            "10",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("hnr,") && lines[2].starts_with("rrt,"));
}

#[test]
fn seed_precedence_is_flag_then_config_then_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 11, "steps": 5}"#).unwrap();
    let seed_of = |args: &[&str], env: Option<&str>| {
        let out_dir = tempfile::tempdir().unwrap();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_hitrun"));
        cmd.arg("--out")
            .arg(out_dir.path())
            .args(args)
            .env_remove("NCW_SEED");
        if let Some(e) = env {
            cmd.env("NCW_SEED", e);
        }
        assert!(cmd.output().unwrap().status.success());
        let plan = report(out_dir.path());
        plan["seed"].as_u64().unwrap()
    };
    let cfg_s = cfg.to_str().unwrap();
    let base = ["plan", "--map", "box", "--budget", "50"];
    let with = |extra: &[&'static str]| extra.iter().copied().chain(base).collect::<Vec<_>>();
    assert_eq!(seed_of(&with(&[]), None), 0);
    assert_eq!(seed_of(&with(&[]), Some("5")), 5);
    assert_eq!(
        seed_of(&[&["--config", cfg_s][..], &base[..]].concat(), Some("5")),
        11
    );
    assert_eq!(
        seed_of(
            &[&["--seed", "3", "--config", cfg_s][..], &base[..]].concat(),
            Some("5")
        ),
        3
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sede": 1}"#).unwrap();
    let out = hitrun(dir.path(), &["--config", cfg.to_str().unwrap(), "map"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_format_writes_json_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = hitrun(
        dir.path(),
        &[
            "--format", "json", "sample", "--map", "box", "--steps", "20",
        ],
    );
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trace.json")).unwrap())
            .unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 21);
}

#[test]
fn generated_map_file_round_trips_through_plan() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        hitrun(dir.path(), &["map", "--gen", "corridor", "--width", "2"])
            .status
            .success()
    );
    let map = dir.path().join("map.json");
    let out = hitrun(
        dir.path(),
        &[
            "--seed",
            "2",
            "plan",
            "--map",
            "file",
            "--map-file",
            map.to_str().unwrap(),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(report(dir.path())["success"], true);
}
