//! The base-level recommender portfolio.
//!
//! Every algorithm is trained once on the aggregated training split and then
//! asked for a ranked top-k list per user. Each algorithm lives in its own
//! source file; those files double as the input of the static code analysis
//! in [`crate::algo_features`] (see [`portfolio_sources`]).

pub mod bpr;
pub mod biasedmf;
pub mod ease;
pub mod implicitmf;
pub mod itemknn;
pub mod pop;
pub mod userknn;

#[cfg(test)]
mod tests;

use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Feedback, IdMap};
use crate::error::{Error, Result};
use crate::util::{derive_seed, label_tag, sha256_hex};

/// Sparse user × item matrix over the dense indices of a training split.
#[derive(Debug, Clone)]
pub struct TrainMatrix {
    users: IdMap,
    items: IdMap,
    /// Per user: (item, rating), sorted by item index.
    rows: Vec<Vec<(usize, f64)>>,
    /// Per item: (user, rating), sorted by user index.
    cols: Vec<Vec<(usize, f64)>>,
    item_counts: Vec<usize>,
    feedback: Feedback,
    ratings_vary: bool,
}

impl TrainMatrix {
    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn users(&self) -> &IdMap {
        &self.users
    }

    pub fn items(&self) -> &IdMap {
        &self.items
    }

    pub fn row(&self, user: usize) -> &[(usize, f64)] {
        &self.rows[user]
    }

    pub fn col(&self, item: usize) -> &[(usize, f64)] {
        &self.cols[item]
    }

    pub fn item_counts(&self) -> &[usize] {
        &self.item_counts
    }

    pub fn feedback(&self) -> Feedback {
        self.feedback
    }

    pub fn has_seen(&self, user: usize, item: usize) -> bool {
        self.rows[user].binary_search_by_key(&item, |&(i, _)| i).is_ok()
    }

    /// (user, item, rating) triples in user-major order.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&(i, r)| (u, i, r)))
            .collect()
    }

    /// Resolves a vector mode against this matrix: implicit data and
    /// constant ratings binarize, varying explicit ratings keep their values.
    pub fn binary_vectors(&self, mode: VectorMode) -> bool {
        match mode {
            VectorMode::Binary => true,
            VectorMode::Rating => false,
            VectorMode::Auto => self.feedback == Feedback::Implicit || !self.ratings_vary,
        }
    }
}

pub fn build_train_matrix(train: &Dataset) -> Result<TrainMatrix> {
    if train.is_empty() {
        return Err(Error::EmptyDataset(format!("training split of `{}` is empty", train.name)));
    }
    let users = train.users().clone();
    let items = train.items().clone();
    let mut rows = vec![Vec::new(); users.len()];
    let mut cols = vec![Vec::new(); items.len()];
    let first = train.interactions()[0].rating;
    let mut ratings_vary = false;
    for it in train.interactions() {
        let u = users.get(&it.user).expect("user indexed");
        let i = items.get(&it.item).expect("item indexed");
        rows[u].push((i, it.rating));
        cols[i].push((u, it.rating));
        ratings_vary |= it.rating != first;
    }
    for row in &mut rows {
        row.sort_by_key(|&(i, _)| i);
        if row.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Precondition(format!(
                "duplicate (user, item) pair in `{}`; ingest the data first",
                train.name
            )));
        }
    }
    for col in &mut cols {
        col.sort_by_key(|&(u, _)| u);
    }
    let item_counts = cols.iter().map(Vec::len).collect();
    Ok(TrainMatrix {
        users,
        items,
        rows,
        cols,
        item_counts,
        feedback: train.feedback,
        ratings_vary,
    })
}

/// How neighborhood models build their item / user vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorMode {
    #[default]
    Auto,
    Binary,
    Rating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmKind {
    #[serde(rename = "Pop")]
    Pop,
    #[serde(rename = "ItemKNN")]
    ItemKnn,
    #[serde(rename = "UserKNN")]
    UserKnn,
    #[serde(rename = "BiasedMF")]
    BiasedMf,
    #[serde(rename = "ImplicitMF")]
    ImplicitMf,
    #[serde(rename = "BPR")]
    Bpr,
    #[serde(rename = "EASE")]
    Ease,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 7] = [
        AlgorithmKind::Pop,
        AlgorithmKind::ItemKnn,
        AlgorithmKind::UserKnn,
        AlgorithmKind::BiasedMf,
        AlgorithmKind::ImplicitMf,
        AlgorithmKind::Bpr,
        AlgorithmKind::Ease,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AlgorithmKind::Pop => "Pop",
            AlgorithmKind::ItemKnn => "ItemKNN",
            AlgorithmKind::UserKnn => "UserKNN",
            AlgorithmKind::BiasedMf => "BiasedMF",
            AlgorithmKind::ImplicitMf => "ImplicitMF",
            AlgorithmKind::Bpr => "BPR",
            AlgorithmKind::Ease => "EASE",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Source file name and text of an algorithm's implementation.
pub fn algorithm_source(kind: AlgorithmKind) -> (&'static str, &'static str) {
    match kind {
        AlgorithmKind::Pop => ("pop.rs", include_str!("pop.rs")),
        AlgorithmKind::ItemKnn => ("itemknn.rs", include_str!("itemknn.rs")),
        AlgorithmKind::UserKnn => ("userknn.rs", include_str!("userknn.rs")),
        AlgorithmKind::BiasedMf => ("biasedmf.rs", include_str!("biasedmf.rs")),
        AlgorithmKind::ImplicitMf => ("implicitmf.rs", include_str!("implicitmf.rs")),
        AlgorithmKind::Bpr => ("bpr.rs", include_str!("bpr.rs")),
        AlgorithmKind::Ease => ("ease.rs", include_str!("ease.rs")),
    }
}

pub fn portfolio_sources() -> Vec<(AlgorithmKind, &'static str, &'static str)> {
    AlgorithmKind::ALL
        .into_iter()
        .map(|k| {
            let (name, text) = algorithm_source(k);
            (k, name, text)
        })
        .collect()
}

/// Hyperparameters of one portfolio entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id")]
pub enum AlgorithmConfig {
    #[serde(rename = "Pop")]
    Pop,
    #[serde(rename = "ItemKNN")]
    ItemKnn(itemknn::ItemKnnConfig),
    #[serde(rename = "UserKNN")]
    UserKnn(userknn::UserKnnConfig),
    #[serde(rename = "BiasedMF")]
    BiasedMf(biasedmf::BiasedMfConfig),
    #[serde(rename = "ImplicitMF")]
    ImplicitMf(implicitmf::ImplicitMfConfig),
    #[serde(rename = "BPR")]
    Bpr(bpr::BprConfig),
    #[serde(rename = "EASE")]
    Ease(ease::EaseConfig),
}

impl AlgorithmConfig {
    pub fn kind(&self) -> AlgorithmKind {
        match self {
            AlgorithmConfig::Pop => AlgorithmKind::Pop,
            AlgorithmConfig::ItemKnn(_) => AlgorithmKind::ItemKnn,
            AlgorithmConfig::UserKnn(_) => AlgorithmKind::UserKnn,
            AlgorithmConfig::BiasedMf(_) => AlgorithmKind::BiasedMf,
            AlgorithmConfig::ImplicitMf(_) => AlgorithmKind::ImplicitMf,
            AlgorithmConfig::Bpr(_) => AlgorithmKind::Bpr,
            AlgorithmConfig::Ease(_) => AlgorithmKind::Ease,
        }
    }

    pub fn default_for(kind: AlgorithmKind) -> Self {
        match kind {
            AlgorithmKind::Pop => AlgorithmConfig::Pop,
            AlgorithmKind::ItemKnn => AlgorithmConfig::ItemKnn(Default::default()),
            AlgorithmKind::UserKnn => AlgorithmConfig::UserKnn(Default::default()),
            AlgorithmKind::BiasedMf => AlgorithmConfig::BiasedMf(Default::default()),
            AlgorithmKind::ImplicitMf => AlgorithmConfig::ImplicitMf(Default::default()),
            AlgorithmKind::Bpr => AlgorithmConfig::Bpr(Default::default()),
            AlgorithmKind::Ease => AlgorithmConfig::Ease(Default::default()),
        }
    }

    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        sha256_hex(json.as_bytes())
    }
}

/// A portfolio entry that is known but cannot run at this scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnavailableAlgorithm {
    pub id: String,
    pub reason: String,
}

/// The checked-in portfolio: enabled algorithms with fixed hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortfolioConfig {
    #[serde(rename = "algorithm")]
    pub algorithms: Vec<AlgorithmConfig>,
    #[serde(default, rename = "unavailable")]
    pub unavailable: Vec<UnavailableAlgorithm>,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        PortfolioConfig {
            algorithms: AlgorithmKind::ALL.into_iter().map(AlgorithmConfig::default_for).collect(),
            unavailable: ["FISM", "LINE", "FPMC"]
                .into_iter()
                .map(|id| UnavailableAlgorithm {
                    id: id.into(),
                    reason: "runtime-prohibitive at desk scale".into(),
                })
                .collect(),
        }
    }
}

impl PortfolioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PortfolioConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("portfolio config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::config("portfolio enables no algorithm"));
        }
        let mut kinds: Vec<_> = self.algorithms.iter().map(AlgorithmConfig::kind).collect();
        kinds.sort();
        if kinds.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("portfolio lists an algorithm twice"));
        }
        for u in &self.unavailable {
            if AlgorithmKind::from_id(&u.id).is_some_and(|k| kinds.contains(&k)) {
                return Err(Error::config(format!("`{}` is both enabled and unavailable", u.id)));
            }
        }
        Ok(())
    }

    pub fn kinds(&self) -> Vec<AlgorithmKind> {
        self.algorithms.iter().map(AlgorithmConfig::kind).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.algorithms.iter().map(|a| a.kind().id().to_string()).collect()
    }
}

/// Algorithm-specific trained state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ModelState {
    Pop(pop::PopModel),
    ItemKnn(itemknn::ItemKnnModel),
    UserKnn(userknn::UserKnnModel),
    BiasedMf(biasedmf::BiasedMfModel),
    ImplicitMf(implicitmf::ImplicitMfModel),
    Bpr(bpr::BprModel),
    Ease(ease::EaseModel),
}

impl ModelState {
    /// Writes a score for every item into `out` (length = number of items).
    pub fn score_user(&self, m: &TrainMatrix, user: usize, out: &mut [f64]) {
        match self {
            ModelState::Pop(s) => s.score_user(out),
            ModelState::ItemKnn(s) => s.score_user(m, user, out),
            ModelState::UserKnn(s) => s.score_user(m, user, out),
            ModelState::BiasedMf(s) => s.score_user(user, out),
            ModelState::ImplicitMf(s) => s.score_user(user, out),
            ModelState::Bpr(s) => s.score_user(user, out),
            ModelState::Ease(s) => s.score_user(m, user, out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommenderModel {
    pub algorithm: AlgorithmKind,
    pub config: AlgorithmConfig,
    pub seed: u64,
    pub state: ModelState,
    pub train_seconds: f64,
}

/// Version tag written into serialized model artifacts.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelArtifact {
    format_version: u32,
    algorithm_id: String,
    config_hash: String,
    model: RecommenderModel,
}

impl RecommenderModel {
    pub fn scores(&self, m: &TrainMatrix, user: usize) -> Vec<f64> {
        let mut out = vec![0.0; m.n_items()];
        self.state.score_user(m, user, &mut out);
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let artifact = ModelArtifact {
            format_version: MODEL_FORMAT_VERSION,
            algorithm_id: self.algorithm.id().to_string(),
            config_hash: self.config.config_hash(),
            model: self.clone(),
        };
        let bytes = serde_json::to_vec(&artifact)?;
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let artifact: ModelArtifact = serde_json::from_slice(&bytes)?;
        if artifact.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::config(format!(
                "model artifact version {} (expected {MODEL_FORMAT_VERSION})",
                artifact.format_version
            )));
        }
        if artifact.config_hash != artifact.model.config.config_hash() {
            return Err(Error::config("model artifact config hash mismatch"));
        }
        Ok(artifact.model)
    }
}

/// Trains one portfolio entry. The seed is specialized per algorithm id.
pub fn train(config: &AlgorithmConfig, m: &TrainMatrix, seed: u64) -> Result<RecommenderModel> {
    let kind = config.kind();
    let seed = derive_seed(seed, &[label_tag(kind.id())]);
    let start = Instant::now();
    let state = match config {
        AlgorithmConfig::Pop => ModelState::Pop(pop::train_pop(m)),
        AlgorithmConfig::ItemKnn(c) => ModelState::ItemKnn(itemknn::train_itemknn(m, c)),
        AlgorithmConfig::UserKnn(c) => ModelState::UserKnn(userknn::train_userknn(m, c)),
        AlgorithmConfig::BiasedMf(c) => ModelState::BiasedMf(biasedmf::train_biasedmf(m, c, seed)?),
        AlgorithmConfig::ImplicitMf(c) => ModelState::ImplicitMf(implicitmf::train_implicitmf(m, c, seed)?),
        AlgorithmConfig::Bpr(c) => ModelState::Bpr(bpr::train_bpr(m, c, seed)?),
        AlgorithmConfig::Ease(c) => ModelState::Ease(ease::train_ease(m, c)?),
    };
    Ok(RecommenderModel {
        algorithm: kind,
        config: config.clone(),
        seed,
        state,
        train_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn train_portfolio(portfolio: &PortfolioConfig, m: &TrainMatrix, seed: u64) -> Result<Vec<RecommenderModel>> {
    portfolio.algorithms.iter().map(|c| train(c, m, seed)).collect()
}

/// Ranked recommendations for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList {
    pub user: String,
    pub items: Vec<String>,
    pub scores: Vec<f64>,
}

/// Top-k (dense item, score) pairs by descending score; ties go to the lower
/// item index. Items flagged by `excluded` are skipped.
pub fn top_k_dense(scores: &[f64], k: usize, excluded: impl Fn(usize) -> bool) -> Vec<(usize, f64)> {
    let mut candidates: Vec<(usize, f64)> = scores
        .iter()
        .copied()
        .enumerate()
        .filter(|&(i, _)| !excluded(i))
        .collect();
    let order = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    if candidates.len() > k && k > 0 {
        candidates.select_nth_unstable_by(k - 1, order);
        candidates.truncate(k);
    }
    candidates.sort_by(order);
    candidates.truncate(k);
    candidates
}

/// Dense-index variant of [`recommend_top_k`] used by the evaluation loop.
pub fn recommend_dense(model: &RecommenderModel, m: &TrainMatrix, user: usize, k: usize, exclude_seen: bool) -> Vec<(usize, f64)> {
    let scores = model.scores(m, user);
    if exclude_seen {
        top_k_dense(&scores, k, |i| m.has_seen(user, i))
    } else {
        top_k_dense(&scores, k, |_| false)
    }
}

pub fn recommend_top_k(
    model: &RecommenderModel,
    m: &TrainMatrix,
    user: &str,
    k: usize,
    exclude_seen: bool,
) -> Result<RecommendationList> {
    let dense = m.users().get(user).ok_or_else(|| Error::ColdStart(user.to_string()))?;
    let ranked = recommend_dense(model, m, dense, k, exclude_seen);
    Ok(RecommendationList {
        user: user.to_string(),
        items: ranked.iter().map(|&(i, _)| m.items().id(i).to_string()).collect(),
        scores: ranked.iter().map(|&(_, s)| s).collect(),
    })
}

/// Top-`k` cosine neighbors of every vector in `vectors`.
///
/// `vectors[a]` lists (coordinate, value) pairs and `transpose` is the same
/// matrix indexed by coordinate. Zero-norm vectors have similarity 0 to
/// everything; only strictly positive similarities are kept. Neighbor lists
/// are sorted by descending similarity, ties by ascending index.
pub(crate) fn cosine_neighbors(
    vectors: &[Vec<(usize, f64)>],
    transpose: &[Vec<(usize, f64)>],
    k: usize,
    binary: bool,
) -> Vec<Vec<(usize, f64)>> {
    let value = |v: f64| if binary { 1.0 } else { v };
    let norms: Vec<f64> = vectors
        .iter()
        .map(|vec| vec.iter().map(|&(_, v)| value(v) * value(v)).sum::<f64>().sqrt())
        .collect();
    let mut dots = vec![0.0; vectors.len()];
    let mut touched = Vec::new();
    vectors
        .iter()
        .enumerate()
        .map(|(a, vec)| {
            for &(coord, va) in vec {
                for &(b, vb) in &transpose[coord] {
                    if b != a {
                        if dots[b] == 0.0 {
                            touched.push(b);
                        }
                        dots[b] += value(va) * value(vb);
                    }
                }
            }
            let mut sims: Vec<(usize, f64)> = touched
                .drain(..)
                .filter_map(|b| {
                    let dot = std::mem::take(&mut dots[b]);
                    let denom = norms[a] * norms[b];
                    (denom > 0.0 && dot > 0.0).then(|| (b, dot / denom))
                })
                .collect();
            sims.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
            sims.truncate(k);
            sims
        })
        .collect()
}
