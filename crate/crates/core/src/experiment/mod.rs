//! Nested cross-validation over users, selection metrics, and the ablation
//! and importance studies built on top of it.

pub mod hpo;
pub mod report;
pub mod studies;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub use hpo::{random_search_hpo, search_candidates, tune_and_fit, HpoSpace, SearchResult};
pub use studies::{group_label, run_ablation, run_importance, AblationConfig, AblationReport, AblationRow, ImportanceRow, DEFAULT_STUDY_FOLDS};

use crate::algo_features::AlgorithmFeatureTable;
use crate::error::{Error, Result};
use crate::ground_truth::{gap_closed, PerformanceMatrix};
use crate::meta::{select_algorithm, GbdtParams, MetaLearner, Mode};
use crate::user_features::UserFeatureTable;
use crate::util::{derive_seed, label_tag, rng};

/// User-disjoint fold labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    /// Fold of each user, aligned with the input user list.
    pub fold_of: Vec<usize>,
}

/// Seeded shuffle, then round-robin: fold sizes differ by at most one.
pub fn make_user_folds(users: &[String], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::config(format!("fold count must be at least 2, got {k}")));
    }
    if users.len() < k {
        return Err(Error::Precondition(format!(
            "{} users cannot fill {k} folds; a fold would be empty",
            users.len()
        )));
    }
    let mut order: Vec<usize> = (0..users.len()).collect();
    order.shuffle(&mut rng(seed));
    let mut fold_of = vec![0; users.len()];
    for (pos, &u) in order.iter().enumerate() {
        fold_of[u] = pos % k;
    }
    Ok(FoldAssignment { k, seed, fold_of })
}

impl FoldAssignment {
    /// Users in fold `f`, ascending.
    pub fn members(&self, f: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&u| self.fold_of[u] == f).collect()
    }

    /// Users outside fold `f`, ascending.
    pub fn train_members(&self, f: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&u| self.fold_of[u] != f).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// Checks that the folds partition the users with no overlap or gap.
    pub fn check_partition(&self) -> Result<()> {
        let mut seen = vec![0usize; self.fold_of.len()];
        for f in 0..self.k {
            let test = self.members(f);
            let mut in_test = vec![false; self.fold_of.len()];
            for &u in &test {
                seen[u] += 1;
                in_test[u] = true;
            }
            if self.train_members(f).iter().any(|&u| in_test[u]) {
                return Err(Error::Numerical(format!("fold {f} overlaps its training users")));
            }
        }
        if seen.iter().any(|&c| c != 1) {
            return Err(Error::Numerical("folds do not partition the users".into()));
        }
        Ok(())
    }
}

/// 1 if any best algorithm of `truth` is among the `k` highest predictions
/// (prediction ties ordered by index).
pub fn top_k_accuracy(predicted: &[f64], truth: &[f64], k: usize) -> bool {
    let best = truth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut order: Vec<usize> = (0..predicted.len()).collect();
    order.sort_by(|&a, &b| predicted[b].total_cmp(&predicted[a]).then(a.cmp(&b)));
    order.iter().take(k).any(|&j| truth[j] == best)
}

/// Student-t half-width of the mean; `None` for fewer than two values.
pub fn ci_half_width(values: &[f64], level: f64) -> Option<f64> {
    let n = values.len();
    if n < 2 || !(level > 0.0 && level < 1.0) {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).ok()?.inverse_cdf((1.0 + level) / 2.0);
    Some(t * var.sqrt() / (n as f64).sqrt())
}

/// Meta-learning inputs aligned with the rows of a performance matrix.
#[derive(Debug, Clone)]
pub struct MetaInputs<'a> {
    pub pm: &'a PerformanceMatrix,
    pub user_rows: Vec<Vec<f64>>,
    pub user_names: Vec<String>,
    pub algorithms: Option<&'a AlgorithmFeatureTable>,
}

impl<'a> MetaInputs<'a> {
    pub fn new(
        pm: &'a PerformanceMatrix,
        users: &UserFeatureTable,
        algorithms: Option<&'a AlgorithmFeatureTable>,
    ) -> Result<Self> {
        let index = users.index();
        let user_rows = pm
            .users()
            .iter()
            .map(|u| {
                index
                    .get(u.as_str())
                    .map(|&i| users.rows[i].to_vec())
                    .ok_or_else(|| Error::Schema(format!("user `{u}` has no feature row")))
            })
            .collect::<Result<_>>()?;
        let user_names = crate::user_features::FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
        Ok(MetaInputs {
            pm,
            user_rows,
            user_names,
            algorithms,
        })
    }

    pub fn fit(&self, mode: Mode, rows: &[usize], params: &GbdtParams) -> Result<MetaLearner> {
        let sub = self.pm.select_users(rows);
        let x: Vec<Vec<f64>> = rows.iter().map(|&r| self.user_rows[r].clone()).collect();
        MetaLearner::fit(mode, &sub, &x, &self.user_names, self.algorithms, params)
    }
}

/// Metrics of one selector on one outer fold. Accuracies are percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub ndcg: f64,
    pub top1: f64,
    pub top3: f64,
}

/// Predicted scores for a fold's test users, plus the tuned parameters if any.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPrediction {
    pub scores: Vec<Vec<f64>>,
    pub params: Option<GbdtParams>,
}

/// Runs `predict(fold, train, test)` on every outer fold and scores the
/// argmax selections against the matrix.
pub fn evaluate_selector<F>(pm: &PerformanceMatrix, folds: &FoldAssignment, predict: F) -> Result<Vec<(FoldOutcome, Option<GbdtParams>)>>
where
    F: Fn(usize, &[usize], &[usize]) -> Result<FoldPrediction> + Sync,
{
    folds.check_partition()?;
    (0..folds.k)
        .into_par_iter()
        .map(|f| {
            let train = folds.train_members(f);
            let test = folds.members(f);
            let pred = predict(f, &train, &test)?;
            if pred.scores.len() != test.len() {
                return Err(Error::Precondition("predictor returned the wrong number of rows".into()));
            }
            let n = test.len() as f64;
            let (mut ndcg, mut top1, mut top3) = (0.0, 0.0, 0.0);
            for (&u, scores) in test.iter().zip(&pred.scores) {
                let truth = pm.row(u);
                ndcg += truth[select_algorithm(scores)];
                top1 += f64::from(u8::from(top_k_accuracy(scores, truth, 1)));
                top3 += f64::from(u8::from(top_k_accuracy(scores, truth, 3)));
            }
            Ok((
                FoldOutcome {
                    ndcg: ndcg / n,
                    top1: 100.0 * top1 / n,
                    top3: 100.0 * top3 / n,
                },
                pred.params,
            ))
        })
        .collect()
}

pub const SBA_NAME: &str = "SBA";
pub const VBA_NAME: &str = "VBA";

pub fn method_name(mode: Mode) -> &'static str {
    match mode {
        Mode::UserOnly => "M(User-Only)",
        Mode::UserAlgo => "M(User+Algo)",
    }
}

/// Fold-level and aggregate metrics of one selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub name: String,
    pub folds: Vec<FoldOutcome>,
    /// Tuned parameters per fold (empty for the baselines).
    pub params: Vec<GbdtParams>,
    pub mean_ndcg: f64,
    pub ci_ndcg: Option<f64>,
    pub mean_top1: f64,
    pub ci_top1: Option<f64>,
    pub mean_top3: f64,
    pub ci_top3: Option<f64>,
    /// Percentage of the SBA→VBA gap closed; absent when VBA = SBA.
    pub gap_closed: Option<f64>,
}

impl MethodSummary {
    fn new(name: &str, results: Vec<(FoldOutcome, Option<GbdtParams>)>) -> Self {
        let folds: Vec<FoldOutcome> = results.iter().map(|(o, _)| *o).collect();
        let params = results.iter().filter_map(|(_, p)| *p).collect();
        let pick = |f: fn(&FoldOutcome) -> f64| folds.iter().map(f).collect::<Vec<f64>>();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ndcg, top1, top3) = (pick(|o| o.ndcg), pick(|o| o.top1), pick(|o| o.top3));
        MethodSummary {
            name: name.to_string(),
            params,
            mean_ndcg: mean(&ndcg),
            ci_ndcg: ci_half_width(&ndcg, 0.95),
            mean_top1: mean(&top1),
            ci_top1: ci_half_width(&top1, 0.95),
            mean_top3: mean(&top3),
            ci_top3: ci_half_width(&top3, 0.95),
            gap_closed: None,
            folds,
        }
    }
}

/// Cross-validation settings shared by evaluation and the studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvConfig {
    pub k: usize,
    pub seed: u64,
    pub hpo: HpoSpace,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            k: 10,
            seed: 0,
            hpo: HpoSpace::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub k: usize,
    pub seed: u64,
    pub n_users: usize,
    pub algorithms: Vec<String>,
    pub methods: Vec<MethodSummary>,
}

impl EvaluationReport {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.name == name)
    }
}

/// SBA: the best training-fold column mean applied to every test user.
pub fn sba_predictor(pm: &PerformanceMatrix) -> impl Fn(usize, &[usize], &[usize]) -> Result<FoldPrediction> + Sync + '_ {
    move |_, train, test| {
        let means = pm.select_users(train).column_means();
        Ok(FoldPrediction {
            scores: vec![means; test.len()],
            params: None,
        })
    }
}

/// VBA: the true scores themselves.
pub fn oracle_predictor(pm: &PerformanceMatrix) -> impl Fn(usize, &[usize], &[usize]) -> Result<FoldPrediction> + Sync + '_ {
    move |_, _, test| {
        Ok(FoldPrediction {
            scores: test.iter().map(|&u| pm.row(u).to_vec()).collect(),
            params: None,
        })
    }
}

/// Meta-learner tuned and refit on each outer training fold.
pub fn meta_predictor<'a>(
    inputs: &'a MetaInputs<'a>,
    mode: Mode,
    cfg: &'a CvConfig,
) -> impl Fn(usize, &[usize], &[usize]) -> Result<FoldPrediction> + Sync + 'a {
    move |fold, train, test| {
        let seed = derive_seed(cfg.seed, &[label_tag(mode.as_str()), fold as u64]);
        let (model, params) = tune_and_fit(inputs, train, mode, &cfg.hpo, seed)?;
        let scores = test
            .iter()
            .map(|&u| model.predict(&inputs.user_rows[u]))
            .collect::<Result<_>>()?;
        Ok(FoldPrediction {
            scores,
            params: Some(params),
        })
    }
}

/// Nested cross-validation of the baselines and of each requested mode.
pub fn run_evaluation(inputs: &MetaInputs, modes: &[Mode], cfg: &CvConfig) -> Result<EvaluationReport> {
    cfg.hpo.validate()?;
    if modes.contains(&Mode::UserAlgo) && inputs.algorithms.is_none() {
        return Err(Error::config("user_algo mode needs an algorithm feature table"));
    }
    let pm = inputs.pm;
    let folds = make_user_folds(pm.users(), cfg.k, derive_seed(cfg.seed, &[label_tag("outer")]))?;
    let mut methods = vec![
        MethodSummary::new(SBA_NAME, evaluate_selector(pm, &folds, sba_predictor(pm))?),
        MethodSummary::new(VBA_NAME, evaluate_selector(pm, &folds, oracle_predictor(pm))?),
    ];
    for &mode in modes {
        let results = evaluate_selector(pm, &folds, meta_predictor(inputs, mode, cfg))?;
        methods.push(MethodSummary::new(method_name(mode), results));
    }
    let (sba_mean, vba_mean) = (methods[0].mean_ndcg, methods[1].mean_ndcg);
    for m in &mut methods {
        m.gap_closed = gap_closed(m.mean_ndcg, sba_mean, vba_mean).ok();
    }
    Ok(EvaluationReport {
        k: cfg.k,
        seed: cfg.seed,
        n_users: pm.n_users(),
        algorithms: pm.algorithms().to_vec(),
        methods,
    })
}

/// Nested cross-validation of one meta-learner architecture.
pub fn run_nested_cv(inputs: &MetaInputs, mode: Mode, cfg: &CvConfig) -> Result<EvaluationReport> {
    run_evaluation(inputs, &[mode], cfg)
}
