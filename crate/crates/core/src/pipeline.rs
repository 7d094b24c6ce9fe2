//! End-to-end stages shared by the command-line tool and the integration tests.

use std::collections::BTreeMap;

use crate::algo_features::conceptual::ConceptualTags;
use crate::algo_features::landmark::{landmark, prepare_probe, Landmarks, Probe, TimingMode};
use crate::algo_features::{assemble_algorithm_features, portfolio_static_metrics, AlgorithmFeatureTable};
use crate::data::{filter_min_interactions, temporal_per_user_split, Dataset, SplitPair, DEFAULT_TEST_FRACTION, MIN_USER_INTERACTIONS};
use crate::error::Result;
use crate::ground_truth::{evaluate_portfolio, EvaluationCoverage, PerformanceMatrix};
use crate::recommenders::{build_train_matrix, train_portfolio, PortfolioConfig};
use crate::synth::ProbeManifest;
use crate::user_features::{compute_feature_table, UserFeatureTable};

/// Activity filter followed by the temporal per-user split.
pub fn prepare_split(ds: &Dataset) -> Result<SplitPair> {
    let filtered = filter_min_interactions(ds, MIN_USER_INTERACTIONS)?;
    temporal_per_user_split(&filtered, DEFAULT_TEST_FRACTION)
}

/// Trains the portfolio on the training half and scores every test user.
pub fn ground_truth(split: &SplitPair, portfolio: &PortfolioConfig, seed: u64) -> Result<(PerformanceMatrix, EvaluationCoverage)> {
    let m = build_train_matrix(&split.train)?;
    let models = train_portfolio(portfolio, &m, seed)?;
    evaluate_portfolio(split, &m, &models)
}

pub fn user_features(split: &SplitPair) -> UserFeatureTable {
    compute_feature_table(&split.train)
}

/// Static metrics, landmarks on freshly generated probes and conceptual tags,
/// joined into one table in portfolio order.
pub fn algorithm_features(
    portfolio: &PortfolioConfig,
    probes: &ProbeManifest,
    tags: &BTreeMap<String, ConceptualTags>,
    seed: u64,
    timing: TimingMode,
) -> Result<(AlgorithmFeatureTable, Landmarks)> {
    let prepared: Vec<Probe> = probes.probes.iter().map(prepare_probe).collect::<Result<_>>()?;
    let landmarks = landmark(portfolio, &prepared, seed, timing)?;
    let statics = portfolio_static_metrics(&portfolio.kinds())?;
    let table = assemble_algorithm_features(&portfolio.ids(), &statics, &landmarks, tags)?;
    Ok((table, landmarks))
}
