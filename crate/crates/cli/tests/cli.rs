use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const STAGES: [&str; 5] = ["ground-truth", "features", "evaluate", "ablate", "importance"];

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_recsel"));
    c.env("RUST_LOG", "warn");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stage(name: &str, config: &Path, out: &Path) -> Output {
    run(&[name, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn unknown_subcommand_prints_usage() {
    let out = run(&["frobnicate"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn missing_config_exits_with_config_code() {
    let out = run(&["ground-truth", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_before_artifacts_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = stage("evaluate", &configs().join("smoke.toml"), dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn data_failure_exits_with_runtime_code() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("tiny.csv");
    std::fs::write(&data, "user,item,rating,timestamp\nu,i,1,1\nu,j,2,2\n").unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 1\nout_dir = \"out\"\n[dataset]\nname = \"tiny\"\npath = \"tiny.csv\"\n").unwrap();
    let out = run(&["ground-truth", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_mode_is_rejected() {
    let cfg = configs().join("smoke.toml");
    let out = run(&["evaluate", "--config", cfg.to_str().unwrap(), "--mode", "both"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn full_pipeline_runs_and_reruns_byte_identically() {
    let cfg = configs().join("smoke.toml");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for out in [a.path(), b.path()] {
        for s in STAGES {
            let o = stage(s, &cfg, out);
            assert!(o.status.success(), "{s}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
    let expected = [
        "ground_truth/performance_matrix.csv",
        "ground_truth/summary.csv",
        "features/user_features.csv",
        "features/algorithm_features.csv",
        "features/landmarks.csv",
        "evaluate/folds.csv",
        "evaluate/summary.csv",
        "evaluate/report.md",
        "ablation/ablation.csv",
        "ablation/ablation.md",
        "importance/importance.csv",
        "importance/importance_top20.md",
    ];
    for f in expected {
        assert!(a.path().join(f).is_file(), "{f} missing");
    }
    for s in ["ground_truth", "features", "evaluate", "ablation", "importance"] {
        let manifest = std::fs::read_to_string(a.path().join(s).join("manifest.json")).unwrap();
        assert!(manifest.contains("\"config_hash\""), "{s}");
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), fb.len());
    for ((pa, ba), (pb, bb)) in fa.iter().zip(&fb) {
        assert_eq!(pa, pb);
        assert!(ba == bb, "{} differs between reruns", pa.display());
    }
    let summary = std::fs::read_to_string(a.path().join("evaluate/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn mode_flag_restricts_evaluation() {
    let cfg = configs().join("smoke.toml");
    let dir = tempfile::tempdir().unwrap();
    for s in ["ground-truth", "features"] {
        assert!(stage(s, &cfg, dir.path()).status.success());
    }
    let out = run(&[
        "evaluate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--mode",
        "user_only",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("evaluate/summary.csv")).unwrap();
    assert!(summary.contains("M(User-Only)") && !summary.contains("M(User+Algo)"));
}

#[test]
fn ingest_and_synth_write_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let rr = configs().join("retailrocket.toml");
    assert!(stage("ingest", &rr, dir.path()).status.success());
    let stats = std::fs::read_to_string(dir.path().join("ingest/stats.csv")).unwrap();
    assert!(stats.starts_with("stage,users,items,interactions,sparsity\ningested,40,"));
    assert!(dir.path().join("ingest/retailrocket.csv").is_file());

    let synth = stage("synth", &configs().join("smoke.toml"), dir.path());
    assert!(synth.status.success());
    let bundled = std::fs::read(configs().join("../data/planted.csv")).unwrap();
    assert_eq!(std::fs::read(dir.path().join("synth/planted.csv")).unwrap(), bundled);
    assert!(dir.path().join("synth/probes/probe_sparse.csv").is_file());
}
