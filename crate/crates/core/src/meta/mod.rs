//! Meta-learners mapping user (and algorithm) features to predicted
//! per-algorithm performance, and the selection rule on top of them.

pub mod gbdt;
pub mod preprocess;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gbdt::{fit_gbdt, BoostedEnsemble, GbdtParams, RegressionTree};
pub use preprocess::{one_hot_apply, one_hot_fit, standardize_apply, standardize_fit, OneHotMap, ScalerParams};

use crate::algo_features::AlgorithmFeatureTable;
use crate::error::{Error, Result};
use crate::ground_truth::PerformanceMatrix;
use crate::util::{argmax, derive_seed, sha256_hex};

/// Meta-learner architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One regressor per algorithm over user features.
    UserOnly,
    /// One regressor over concatenated user and algorithm features.
    UserAlgo,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::UserOnly => "user_only",
            Mode::UserAlgo => "user_algo",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "user_only" => Ok(Mode::UserOnly),
            "user_algo" => Ok(Mode::UserAlgo),
            other => Err(Error::config(format!("unknown mode `{other}` (expected user_only or user_algo)"))),
        }
    }
}

/// N independent ensembles, one per algorithm column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiOutputModel {
    pub outputs: Vec<BoostedEnsemble>,
}

impl MultiOutputModel {
    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        self.outputs.iter().map(|m| m.predict(x)).collect()
    }
}

/// Seed used for output column `j`.
pub fn column_seed(seed: u64, j: usize) -> u64 {
    derive_seed(seed, &[j as u64])
}

pub fn fit_multi_output(x: &[Vec<f64>], y: &[Vec<f64>], params: &GbdtParams) -> Result<MultiOutputModel> {
    let n_out = y.first().map(Vec::len).ok_or_else(|| Error::Precondition("no target rows".into()))?;
    if y.iter().any(|r| r.len() != n_out) {
        return Err(Error::Precondition("ragged target rows".into()));
    }
    let outputs = (0..n_out)
        .into_par_iter()
        .map(|j| {
            let col: Vec<f64> = y.iter().map(|r| r[j]).collect();
            fit_gbdt(
                x,
                &col,
                &GbdtParams {
                    seed: column_seed(params.seed, j),
                    ..*params
                },
            )
        })
        .collect::<Result<_>>()?;
    Ok(MultiOutputModel { outputs })
}

/// Wide layout: one row of user features and N targets per user.
#[derive(Debug, Clone, PartialEq)]
pub struct WideMetaDataset {
    pub users: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub algorithms: Vec<String>,
}

pub fn build_wide_format(pm: &PerformanceMatrix, user_rows: &[Vec<f64>]) -> Result<WideMetaDataset> {
    if user_rows.len() != pm.n_users() {
        return Err(Error::Precondition(format!(
            "{} feature rows for {} users",
            user_rows.len(),
            pm.n_users()
        )));
    }
    Ok(WideMetaDataset {
        users: pm.users().to_vec(),
        x: user_rows.to_vec(),
        y: (0..pm.n_users()).map(|u| pm.row(u).to_vec()).collect(),
        algorithms: pm.algorithms().to_vec(),
    })
}

/// Long layout: one row per (user, algorithm) pair, user-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LongMetaDataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    /// (user row, algorithm column) of each row.
    pub pairs: Vec<(usize, usize)>,
}

/// `algo_rows[a]` must be the encoded features of `pm.algorithms()[a]`.
pub fn build_long_format(pm: &PerformanceMatrix, user_rows: &[Vec<f64>], algo_rows: &[Vec<f64>]) -> Result<LongMetaDataset> {
    if user_rows.len() != pm.n_users() || algo_rows.len() != pm.n_algorithms() {
        return Err(Error::Precondition("feature rows do not match the performance matrix".into()));
    }
    let n = pm.n_users() * pm.n_algorithms();
    let mut out = LongMetaDataset {
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        pairs: Vec::with_capacity(n),
    };
    for (u, urow) in user_rows.iter().enumerate() {
        for (a, arow) in algo_rows.iter().enumerate() {
            out.x.push(urow.iter().chain(arow).copied().collect());
            out.y.push(pm.get(u, a));
            out.pairs.push((u, a));
        }
    }
    Ok(out)
}

/// Algorithm-table encoder: standardized numeric columns followed by one-hot
/// categorical columns, keyed by algorithm id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmEncoder {
    pub numeric_names: Vec<String>,
    pub categorical_names: Vec<String>,
    pub scaler: ScalerParams,
    pub one_hot: OneHotMap,
    pub encoded: BTreeMap<String, Vec<f64>>,
}

impl AlgorithmEncoder {
    /// Fits on the rows of `algorithms` only.
    pub fn fit(table: &AlgorithmFeatureTable, algorithms: &[String]) -> Result<Self> {
        let idx: Vec<usize> = algorithms
            .iter()
            .map(|a| {
                table
                    .index(a)
                    .ok_or_else(|| Error::config(format!("algorithm `{a}` missing from the algorithm feature table")))
            })
            .collect::<Result<_>>()?;
        let numeric: Vec<Vec<f64>> = idx.iter().map(|&i| table.numeric_row(i).to_vec()).collect();
        let categorical: Vec<Vec<String>> = idx.iter().map(|&i| table.categorical_row(i).to_vec()).collect();
        let scaler = standardize_fit(&numeric)?;
        let one_hot = one_hot_fit(&categorical)?;
        let encoded = algorithms
            .iter()
            .zip(numeric.iter().zip(&categorical))
            .map(|(a, (num, cat))| {
                let mut row = scaler.apply_row(num);
                row.extend(one_hot.apply_row(cat));
                (a.clone(), row)
            })
            .collect();
        Ok(AlgorithmEncoder {
            numeric_names: table.numeric_names().to_vec(),
            categorical_names: table.categorical_names().to_vec(),
            scaler,
            one_hot,
            encoded,
        })
    }

    pub fn names(&self) -> Vec<String> {
        let mut names = self.numeric_names.clone();
        names.extend(self.one_hot.names(&self.categorical_names));
        names
    }

    pub fn get(&self, algorithm: &str) -> Result<&[f64]> {
        self.encoded
            .get(algorithm)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::config(format!("no encoded features for algorithm `{algorithm}`")))
    }
}

pub fn predict_scores_user_only(model: &MultiOutputModel, user_row: &[f64]) -> Vec<f64> {
    model.predict(user_row)
}

/// One prediction per algorithm of `order`, looked up by id.
pub fn predict_scores_user_algo(
    model: &BoostedEnsemble,
    user_row: &[f64],
    algorithms: &AlgorithmEncoder,
    order: &[String],
) -> Result<Vec<f64>> {
    let mut x = user_row.to_vec();
    order
        .iter()
        .map(|a| {
            x.truncate(user_row.len());
            x.extend_from_slice(algorithms.get(a)?);
            Ok(model.predict(&x))
        })
        .collect()
}

/// Index of the highest score; ties go to the lowest index.
pub fn select_algorithm(scores: &[f64]) -> usize {
    argmax(scores).expect("at least one score")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MetaModel {
    Wide(MultiOutputModel),
    Long(BoostedEnsemble),
}

/// A fitted meta-learner together with the preprocessing fitted on its
/// training users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaLearner {
    pub mode: Mode,
    pub algorithms: Vec<String>,
    pub user_feature_names: Vec<String>,
    pub user_scaler: ScalerParams,
    pub algorithm_encoder: Option<AlgorithmEncoder>,
    pub params: GbdtParams,
    pub model: MetaModel,
}

impl MetaLearner {
    /// `user_rows[u]` holds the raw features of `pm.users()[u]`.
    pub fn fit(
        mode: Mode,
        pm: &PerformanceMatrix,
        user_rows: &[Vec<f64>],
        user_feature_names: &[String],
        algorithm_table: Option<&AlgorithmFeatureTable>,
        params: &GbdtParams,
    ) -> Result<Self> {
        if user_rows.len() != pm.n_users() {
            return Err(Error::Precondition("user feature rows do not match the matrix".into()));
        }
        let user_scaler = standardize_fit(user_rows)?;
        let scaled = standardize_apply(&user_scaler, user_rows);
        let (algorithm_encoder, model) = match mode {
            Mode::UserOnly => {
                let wide = build_wide_format(pm, &scaled)?;
                (None, MetaModel::Wide(fit_multi_output(&wide.x, &wide.y, params)?))
            }
            Mode::UserAlgo => {
                let table = algorithm_table
                    .ok_or_else(|| Error::config("user_algo mode needs an algorithm feature table"))?;
                let encoder = AlgorithmEncoder::fit(table, pm.algorithms())?;
                let algo_rows: Vec<Vec<f64>> = pm
                    .algorithms()
                    .iter()
                    .map(|a| encoder.get(a).map(<[f64]>::to_vec))
                    .collect::<Result<_>>()?;
                let long = build_long_format(pm, &scaled, &algo_rows)?;
                (Some(encoder), MetaModel::Long(fit_gbdt(&long.x, &long.y, params)?))
            }
        };
        Ok(MetaLearner {
            mode,
            algorithms: pm.algorithms().to_vec(),
            user_feature_names: user_feature_names.to_vec(),
            user_scaler,
            algorithm_encoder,
            params: *params,
            model,
        })
    }

    /// Predicted performance of every algorithm for one user's raw features.
    pub fn predict(&self, user_row: &[f64]) -> Result<Vec<f64>> {
        if user_row.len() != self.user_scaler.width() {
            return Err(Error::Precondition(format!(
                "expected {} user features, got {}",
                self.user_scaler.width(),
                user_row.len()
            )));
        }
        let scaled = self.user_scaler.apply_row(user_row);
        match (&self.model, &self.algorithm_encoder) {
            (MetaModel::Wide(m), _) => Ok(predict_scores_user_only(m, &scaled)),
            (MetaModel::Long(m), Some(enc)) => predict_scores_user_algo(m, &scaled, enc, &self.algorithms),
            (MetaModel::Long(_), None) => Err(Error::config("long-format model without an algorithm encoder")),
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names = self.user_feature_names.clone();
        if let Some(enc) = &self.algorithm_encoder {
            names.extend(enc.names());
        }
        names
    }

    /// Normalized split gain per input feature.
    pub fn feature_importance(&self) -> Vec<(String, f64)> {
        let gains = match &self.model {
            MetaModel::Wide(m) => multi_output_gains(m),
            MetaModel::Long(m) => m.gains.clone(),
        };
        self.feature_names().into_iter().zip(normalize(&gains)).collect()
    }
}

fn multi_output_gains(m: &MultiOutputModel) -> Vec<f64> {
    let width = m.outputs.first().map_or(0, BoostedEnsemble::n_features);
    (0..width).map(|f| m.outputs.iter().map(|o| o.gains[f]).sum()).collect()
}

fn normalize(gains: &[f64]) -> Vec<f64> {
    let total: f64 = gains.iter().sum();
    if total > 0.0 {
        gains.iter().map(|g| g / total).collect()
    } else {
        vec![0.0; gains.len()]
    }
}

/// Normalized importance of a single ensemble.
pub fn feature_importance(model: &BoostedEnsemble) -> Vec<f64> {
    normalize(&model.gains)
}

/// Normalized importance of a multi-output model, summed over outputs.
pub fn multi_output_importance(model: &MultiOutputModel) -> Vec<f64> {
    normalize(&multi_output_gains(model))
}

pub const META_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct MetaArtifact {
    format_version: u32,
    config_hash: String,
    seed: u64,
    learner: MetaLearner,
}

impl MetaLearner {
    /// Hash of the training hyperparameters.
    pub fn config_hash(&self) -> String {
        let key = (self.mode, &self.params, &self.algorithms, self.feature_names());
        sha256_hex(serde_json::to_string(&key).expect("serializable").as_bytes())
    }

    pub fn seed(&self) -> u64 {
        self.params.seed
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let artifact = MetaArtifact {
            format_version: META_FORMAT_VERSION,
            config_hash: self.config_hash(),
            seed: self.seed(),
            learner: self.clone(),
        };
        let json = serde_json::to_string(&artifact)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let artifact: MetaArtifact = serde_json::from_str(&text)?;
        if artifact.format_version != META_FORMAT_VERSION {
            return Err(Error::Schema(format!("unsupported meta model version {}", artifact.format_version)));
        }
        if artifact.config_hash != artifact.learner.config_hash() {
            return Err(Error::Schema("meta model config hash mismatch".into()));
        }
        Ok(artifact.learner)
    }
}
