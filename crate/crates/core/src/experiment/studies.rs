//! Ablation over algorithm-feature groups and cross-fold feature importance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{make_user_folds, run_evaluation, tune_and_fit, CvConfig, MetaInputs, MethodSummary};
use crate::algo_features::FeatureGroup;
use crate::error::{Error, Result};
use crate::meta::Mode;
use crate::util::{derive_seed, label_tag, mean_std};

pub const DEFAULT_STUDY_FOLDS: usize = 5;

/// One ablation arm: the algorithm-feature groups kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblationConfig {
    pub name: String,
    pub groups: Vec<FeatureGroup>,
}

impl AblationConfig {
    /// User-only reference, each group alone, and all groups together.
    pub fn standard_set() -> Vec<AblationConfig> {
        let mut out = vec![AblationConfig {
            name: "User-Only".into(),
            groups: vec![],
        }];
        out.extend(FeatureGroup::ALL.into_iter().map(|g| AblationConfig {
            name: format!("User+{}", group_label(g)),
            groups: vec![g],
        }));
        out.push(AblationConfig {
            name: "User+All".into(),
            groups: FeatureGroup::ALL.to_vec(),
        });
        out
    }
}

pub fn group_label(g: FeatureGroup) -> &'static str {
    match g {
        FeatureGroup::Code => "Code",
        FeatureGroup::Ast => "AST",
        FeatureGroup::Performance => "Performance",
        FeatureGroup::Conceptual => "Conceptual",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub name: String,
    pub groups: Vec<FeatureGroup>,
    /// Encoded algorithm-feature columns the arm sees.
    pub algorithm_columns: usize,
    pub summary: MethodSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub k: usize,
    pub sba_ndcg: f64,
    pub vba_ndcg: f64,
    pub rows: Vec<AblationRow>,
}

/// Runs the nested protocol once per arm. An arm with no groups is the
/// user-only architecture; any other arm is user+algo restricted to its groups.
pub fn run_ablation(inputs: &MetaInputs, configs: &[AblationConfig], cfg: &CvConfig) -> Result<AblationReport> {
    let table = inputs
        .algorithms
        .ok_or_else(|| Error::config("ablation needs an algorithm feature table"))?;
    let mut rows = Vec::with_capacity(configs.len());
    let mut baselines = None;
    for arm in configs {
        let (report, columns) = if arm.groups.is_empty() {
            (run_evaluation(&MetaInputs { algorithms: None, ..inputs.clone() }, &[Mode::UserOnly], cfg)?, 0)
        } else {
            let sub = table.select_groups(&arm.groups);
            let width = sub.encoded_width();
            let arm_inputs = MetaInputs {
                algorithms: Some(&sub),
                ..inputs.clone()
            };
            (run_evaluation(&arm_inputs, &[Mode::UserAlgo], cfg)?, width)
        };
        baselines.get_or_insert((report.methods[0].mean_ndcg, report.methods[1].mean_ndcg));
        rows.push(AblationRow {
            name: arm.name.clone(),
            groups: arm.groups.clone(),
            algorithm_columns: columns,
            summary: report.methods[2].clone(),
        });
    }
    let (sba_ndcg, vba_ndcg) = baselines.ok_or_else(|| Error::config("ablation lists no arm"))?;
    Ok(AblationReport {
        k: cfg.k,
        sba_ndcg,
        vba_ndcg,
        rows,
    })
}

/// Mean and standard deviation of one feature's normalized importance
/// across folds (population std).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub feature: String,
    pub mean: f64,
    pub std: f64,
}

/// Tunes and fits the user+algo model on the training part of each fold and
/// aggregates its feature importances. Rows are sorted by decreasing mean,
/// ties by name.
pub fn run_importance(inputs: &MetaInputs, cfg: &CvConfig) -> Result<Vec<ImportanceRow>> {
    if inputs.algorithms.is_none() {
        return Err(Error::config("importance study needs an algorithm feature table"));
    }
    cfg.hpo.validate()?;
    let folds = make_user_folds(inputs.pm.users(), cfg.k, derive_seed(cfg.seed, &[label_tag("outer")]))?;
    folds.check_partition()?;
    let mode = Mode::UserAlgo;
    let per_fold: Vec<Vec<(String, f64)>> = (0..cfg.k)
        .into_par_iter()
        .map(|f| {
            let seed = derive_seed(cfg.seed, &[label_tag(mode.as_str()), f as u64]);
            let (model, _) = tune_and_fit(inputs, &folds.train_members(f), mode, &cfg.hpo, seed)?;
            Ok(model.feature_importance())
        })
        .collect::<Result<_>>()?;
    let names: Vec<String> = per_fold[0].iter().map(|(n, _)| n.clone()).collect();
    if per_fold.iter().any(|f| f.iter().map(|(n, _)| n).ne(names.iter())) {
        // one-hot widths are fitted on all portfolio rows, so this cannot differ
        return Err(Error::Numerical("feature layout differs across folds".into()));
    }
    let mut rows: Vec<ImportanceRow> = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let values: Vec<f64> = per_fold.iter().map(|f| f[j].1).collect();
            let (mean, std) = mean_std(&values);
            ImportanceRow {
                feature: name.clone(),
                mean,
                std,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.mean.total_cmp(&a.mean).then_with(|| a.feature.cmp(&b.feature)));
    Ok(rows)
}
