//! Random hyperparameter search scored by inner cross-validation.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{make_user_folds, MetaInputs};
use crate::error::{Error, Result};
use crate::meta::{GbdtParams, MetaLearner, Mode};
use crate::util::{derive_seed, rng};

/// Search distributions. Integer ranges are inclusive; the learning rate is
/// drawn log-uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HpoSpace {
    pub num_trees: [usize; 2],
    pub learning_rate: [f64; 2],
    pub max_depth: [usize; 2],
    pub min_samples_leaf: [usize; 2],
    pub subsample: [f64; 2],
    pub n_iter: usize,
    pub inner_k: usize,
    pub seed: u64,
}

impl Default for HpoSpace {
    fn default() -> Self {
        HpoSpace {
            num_trees: [50, 400],
            learning_rate: [0.01, 0.3],
            max_depth: [2, 8],
            min_samples_leaf: [1, 50],
            subsample: [0.6, 1.0],
            n_iter: 50,
            inner_k: 3,
            seed: 0,
        }
    }
}

impl HpoSpace {
    pub fn validate(&self) -> Result<()> {
        let ordered_usize = |r: [usize; 2]| r[0] <= r[1];
        let checks = [
            (self.n_iter >= 1, "n_iter must be at least 1"),
            (self.inner_k >= 2, "inner_k must be at least 2"),
            (ordered_usize(self.num_trees), "num_trees range is reversed"),
            (ordered_usize(self.max_depth) && self.max_depth[0] >= 1, "max_depth range must be ordered and >= 1"),
            (
                ordered_usize(self.min_samples_leaf) && self.min_samples_leaf[0] >= 1,
                "min_samples_leaf range must be ordered and >= 1",
            ),
            (
                self.learning_rate[0] > 0.0 && self.learning_rate[0] <= self.learning_rate[1],
                "learning_rate range must be positive and ordered",
            ),
            (
                self.subsample[0] > 0.0 && self.subsample[0] <= self.subsample[1] && self.subsample[1] <= 1.0,
                "subsample range must lie in (0, 1] and be ordered",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::config(format!("hpo space: {msg}"))),
            None => Ok(()),
        }
    }

    /// `n_iter` candidates drawn from a stream seeded by `seed`.
    pub fn sample(&self, seed: u64) -> Vec<GbdtParams> {
        let mut r = rng(seed);
        (0..self.n_iter)
            .map(|i| {
                let [lo, hi] = self.learning_rate;
                let lr = (r.gen_range(0.0..=1.0) * (hi.ln() - lo.ln()) + lo.ln()).exp();
                GbdtParams {
                    num_trees: r.gen_range(self.num_trees[0]..=self.num_trees[1]),
                    learning_rate: lr.clamp(lo, hi),
                    max_depth: r.gen_range(self.max_depth[0]..=self.max_depth[1]),
                    min_samples_leaf: r.gen_range(self.min_samples_leaf[0]..=self.min_samples_leaf[1]),
                    subsample: r.gen_range(self.subsample[0]..=self.subsample[1]),
                    seed: derive_seed(seed, &[i as u64]),
                }
            })
            .collect()
    }
}

/// Validation MSE of each candidate and the winner (lowest MSE, earliest on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: GbdtParams,
    pub best_index: usize,
    pub scores: Vec<f64>,
}

/// Scores `candidates` by `inner_k`-fold CV over `rows` (indices into the
/// full matrix) and returns the lowest pooled validation MSE.
pub fn search_candidates(
    inputs: &MetaInputs,
    rows: &[usize],
    mode: Mode,
    candidates: &[GbdtParams],
    inner_k: usize,
    seed: u64,
) -> Result<SearchResult> {
    if candidates.is_empty() {
        return Err(Error::config("hyperparameter search needs at least one candidate"));
    }
    let ids: Vec<String> = rows.iter().map(|&r| inputs.pm.users()[r].clone()).collect();
    let folds = make_user_folds(&ids, inner_k, seed)?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..inner_k)
        .map(|f| {
            let pick = |v: Vec<usize>| v.into_iter().map(|i| rows[i]).collect::<Vec<_>>();
            (pick(folds.train_members(f)), pick(folds.members(f)))
        })
        .collect();
    let scores: Vec<f64> = candidates
        .par_iter()
        .map(|params| {
            let mut sse = 0.0;
            let mut count = 0usize;
            for (train, valid) in &splits {
                let model = inputs.fit(mode, train, params)?;
                for &u in valid {
                    let pred = model.predict(&inputs.user_rows[u])?;
                    sse += pred
                        .iter()
                        .zip(inputs.pm.row(u))
                        .map(|(p, t)| (p - t).powi(2))
                        .sum::<f64>();
                    count += pred.len();
                }
            }
            Ok(sse / count as f64)
        })
        .collect::<Result<_>>()?;
    let mut best_index = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s < scores[best_index] {
            best_index = i;
        }
    }
    Ok(SearchResult {
        best: candidates[best_index],
        best_index,
        scores,
    })
}

/// Random search: samples `space.n_iter` candidates and keeps the best.
pub fn random_search_hpo(inputs: &MetaInputs, rows: &[usize], mode: Mode, space: &HpoSpace, seed: u64) -> Result<SearchResult> {
    space.validate()?;
    let candidates = space.sample(derive_seed(seed, &[0]));
    search_candidates(inputs, rows, mode, &candidates, space.inner_k, derive_seed(seed, &[1]))
}

/// Fits the winning configuration on all of `rows`.
pub fn tune_and_fit(inputs: &MetaInputs, rows: &[usize], mode: Mode, space: &HpoSpace, seed: u64) -> Result<(MetaLearner, GbdtParams)> {
    let found = random_search_hpo(inputs, rows, mode, space, seed)?;
    Ok((inputs.fit(mode, rows, &found.best)?, found.best))
}
