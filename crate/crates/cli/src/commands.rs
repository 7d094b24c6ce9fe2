use std::path::{Path, PathBuf};

use recsel::algo_features::AlgorithmFeatureTable;
use recsel::data::{dataset_stats, filter_min_interactions, ingest_raw, Dataset, IngestConfig, MIN_USER_INTERACTIONS};
use recsel::experiment::{report, run_ablation, run_evaluation, run_importance, MetaInputs};
use recsel::ground_truth::{sba, vba, PerformanceMatrix};
use recsel::meta::Mode;
use recsel::pipeline;
use recsel::synth::{planted_dataset, probe_dataset};
use recsel::user_features::UserFeatureTable;
use recsel::util::fmt_f64;

use crate::config::{require_file, RunConfig};
use crate::manifest::ManifestBuilder;
use crate::CliError;

const GROUND_TRUTH_DIR: &str = "ground_truth";
const FEATURES_DIR: &str = "features";
const PM_FILE: &str = "performance_matrix.csv";
const USER_FEATURES_FILE: &str = "user_features.csv";
const ALGO_FEATURES_FILE: &str = "algorithm_features.csv";

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    recsel::Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
    .into()
}

fn stage_dir(cfg: &RunConfig, name: &str) -> Result<PathBuf, CliError> {
    let dir = cfg.out_dir.join(name);
    std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in rows {
        s.push_str(&format!("{k},{v}\n"));
    }
    s
}

fn load_dataset(cfg: &RunConfig, m: &mut ManifestBuilder) -> Result<Dataset, CliError> {
    let path = cfg.dataset_path();
    require_file(&path)?;
    m.input("dataset", &path)?;
    Ok(Dataset::read_csv(&cfg.dataset.name, &path)?.with_feedback(cfg.dataset.feedback))
}

pub fn ingest(cfg: &RunConfig) -> Result<(), CliError> {
    let (Some(raw), Some(settings)) = (&cfg.dataset.raw, &cfg.dataset.ingest) else {
        return Err(CliError::Config("ingest needs dataset.raw and dataset.ingest".into()));
    };
    require_file(raw)?;
    require_file(settings)?;
    let mut m = ManifestBuilder::new(cfg, "ingest", stage_dir(cfg, "ingest")?);
    m.input("raw", raw)?;
    m.input("ingest_config", settings)?;
    let ingest_cfg = IngestConfig {
        name: cfg.dataset.name.clone(),
        ..IngestConfig::load(settings)?
    };
    let ds = ingest_raw(raw, &ingest_cfg)?;
    let file = format!("{}.csv", cfg.dataset.name);
    ds.write_csv(&m.dir().join(&file))?;
    m.output(file);

    let before = dataset_stats(&ds)?;
    let after = dataset_stats(&filter_min_interactions(&ds, MIN_USER_INTERACTIONS)?)?;
    let mut stats = String::from("stage,users,items,interactions,sparsity\n");
    for (stage, s) in [("ingested", before), ("filtered", after)] {
        stats.push_str(&format!("{stage},{},{},{},{}\n", s.users, s.items, s.interactions, fmt_f64(s.sparsity)));
    }
    write_text(&m.dir().join("stats.csv"), &stats)?;
    m.output("stats.csv");
    log::info!("ingested {} interactions from {} users", before.interactions, before.users);
    m.finish()?;
    Ok(())
}

pub fn synth(cfg: &RunConfig) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new(cfg, "synth", stage_dir(cfg, "synth")?);
    let ds = planted_dataset(&cfg.synth)?;
    let file = format!("{}.csv", cfg.dataset.name);
    ds.write_csv(&m.dir().join(&file))?;
    m.output(file);
    let probe_dir = m.dir().join("probes");
    std::fs::create_dir_all(&probe_dir).map_err(|e| io_err(&probe_dir, e))?;
    if let Some(p) = &cfg.probes {
        m.input("probes", p)?;
    }
    for spec in cfg.probe_manifest()?.probes {
        let name = format!("probes/{}.csv", spec.name);
        probe_dataset(&spec).write_csv(&m.dir().join(&name))?;
        m.output(name);
    }
    log::info!("wrote {} interactions for {} users", ds.len(), ds.users().len());
    m.finish()?;
    Ok(())
}

pub fn ground_truth(cfg: &RunConfig) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new(cfg, "ground-truth", stage_dir(cfg, GROUND_TRUTH_DIR)?);
    if let Some(p) = &cfg.portfolio {
        m.input("portfolio", p)?;
    }
    let portfolio = cfg.portfolio()?;
    let split = pipeline::prepare_split(&load_dataset(cfg, &mut m)?)?;
    let (pm, coverage) = pipeline::ground_truth(&split, &portfolio, cfg.seeds().portfolio)?;
    pm.write_csv(&m.dir().join(PM_FILE))?;
    m.output(PM_FILE);

    let (best, best_mean) = sba(&pm);
    let summary = key_value_csv(&[
        ("users", pm.n_users().to_string()),
        ("algorithms", pm.n_algorithms().to_string()),
        ("skipped_cold", coverage.skipped_cold.to_string()),
        ("skipped_empty", coverage.skipped_empty.to_string()),
        ("sba_algorithm", pm.algorithms()[best].clone()),
        ("sba_mean_ndcg_at_10", fmt_f64(best_mean)),
        ("vba_mean_ndcg_at_10", fmt_f64(vba(&pm))),
    ]);
    write_text(&m.dir().join("summary.csv"), &summary)?;
    m.output("summary.csv");
    let mut means = String::from("algorithm,mean_ndcg_at_10\n");
    for (a, v) in pm.algorithms().iter().zip(pm.column_means()) {
        means.push_str(&format!("{a},{}\n", fmt_f64(v)));
    }
    write_text(&m.dir().join("column_means.csv"), &means)?;
    m.output("column_means.csv");
    log::info!("SBA {} at {best_mean:.4}, VBA {:.4}", pm.algorithms()[best], vba(&pm));
    m.finish()?;
    Ok(())
}

pub fn features(cfg: &RunConfig) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new(cfg, "features", stage_dir(cfg, FEATURES_DIR)?);
    for (role, p) in [("portfolio", &cfg.portfolio), ("probes", &cfg.probes), ("conceptual", &cfg.conceptual)] {
        if let Some(p) = p {
            m.input(role, p)?;
        }
    }
    let portfolio = cfg.portfolio()?;
    let probes = cfg.probe_manifest()?;
    let tags = cfg.conceptual_map(&portfolio.ids())?;
    let split = pipeline::prepare_split(&load_dataset(cfg, &mut m)?)?;

    pipeline::user_features(&split).write_csv(&m.dir().join(USER_FEATURES_FILE))?;
    m.output(USER_FEATURES_FILE);
    let (table, landmarks) = pipeline::algorithm_features(&portfolio, &probes, &tags, cfg.seeds().landmarks, cfg.timing)?;
    table.write_csv(&m.dir().join(ALGO_FEATURES_FILE))?;
    m.output(ALGO_FEATURES_FILE);
    landmarks.write_csv(&m.dir().join("landmarks.csv"))?;
    m.output("landmarks.csv");
    m.finish()?;
    Ok(())
}

/// The ground-truth and feature artifacts the experiment commands consume.
struct Artifacts {
    pm: PerformanceMatrix,
    users: UserFeatureTable,
    algorithms: AlgorithmFeatureTable,
}

fn load_artifacts(cfg: &RunConfig, m: &mut ManifestBuilder) -> Result<Artifacts, CliError> {
    let pm_path = cfg.out_dir.join(GROUND_TRUTH_DIR).join(PM_FILE);
    let uf_path = cfg.out_dir.join(FEATURES_DIR).join(USER_FEATURES_FILE);
    let af_path = cfg.out_dir.join(FEATURES_DIR).join(ALGO_FEATURES_FILE);
    for p in [&pm_path, &uf_path, &af_path] {
        if !p.is_file() {
            return Err(CliError::Config(format!(
                "{} is missing; run `ground-truth` and `features` first",
                p.display()
            )));
        }
    }
    m.input("performance_matrix", &pm_path)?;
    m.input("user_features", &uf_path)?;
    m.input("algorithm_features", &af_path)?;
    Ok(Artifacts {
        pm: PerformanceMatrix::read_csv(&pm_path)?,
        users: UserFeatureTable::read_csv(&uf_path)?,
        algorithms: AlgorithmFeatureTable::read_csv(&af_path)?,
    })
}

pub fn evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new(cfg, "evaluate", stage_dir(cfg, "evaluate")?);
    let a = load_artifacts(cfg, &mut m)?;
    let needs_algo = cfg.experiment.modes.contains(&Mode::UserAlgo);
    let inputs = MetaInputs::new(&a.pm, &a.users, needs_algo.then_some(&a.algorithms))?;
    let result = run_evaluation(&inputs, &cfg.experiment.modes, &cfg.evaluation_cv())?;
    report::write_evaluation(&result, m.dir())?;
    for f in ["folds.csv", "summary.csv", "report.md"] {
        m.output(f);
    }
    for s in &result.methods {
        log::info!("{}: NDCG@10 {:.4}, Top-1 {:.1}%", s.name, s.mean_ndcg, s.mean_top1);
    }
    m.finish()?;
    Ok(())
}

pub fn ablate(cfg: &RunConfig) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new(cfg, "ablate", stage_dir(cfg, "ablation")?);
    let a = load_artifacts(cfg, &mut m)?;
    let inputs = MetaInputs::new(&a.pm, &a.users, Some(&a.algorithms))?;
    let result = run_ablation(&inputs, &cfg.experiment.ablation, &cfg.study_cv())?;
    report::write_ablation(&result, m.dir())?;
    m.output("ablation.csv");
    m.output("ablation.md");
    m.finish()?;
    Ok(())
}

pub fn importance(cfg: &RunConfig) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new(cfg, "importance", stage_dir(cfg, "importance")?);
    let a = load_artifacts(cfg, &mut m)?;
    let inputs = MetaInputs::new(&a.pm, &a.users, Some(&a.algorithms))?;
    let rows = run_importance(&inputs, &cfg.study_cv())?;
    report::write_importance(&rows, m.dir())?;
    m.output("importance.csv");
    m.output("importance_top20.md");
    m.finish()?;
    Ok(())
}
