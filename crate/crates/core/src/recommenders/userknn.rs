//! User-based k-nearest-neighbors with cosine similarity.

use serde::{Deserialize, Serialize};

use super::{cosine_neighbors, TrainMatrix, VectorMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserKnnConfig {
    pub neighbors: usize,
    #[serde(default)]
    pub vectors: VectorMode,
}

impl Default for UserKnnConfig {
    fn default() -> Self {
        UserKnnConfig {
            neighbors: 30,
            vectors: VectorMode::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserKnnModel {
    /// Per user: the most similar users with their cosine similarity.
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub binary: bool,
}

pub fn train_userknn(m: &TrainMatrix, config: &UserKnnConfig) -> UserKnnModel {
    let binary = m.binary_vectors(config.vectors);
    let user_vectors: Vec<Vec<(usize, f64)>> = (0..m.n_users()).map(|u| m.row(u).to_vec()).collect();
    let item_vectors: Vec<Vec<(usize, f64)>> = (0..m.n_items()).map(|i| m.col(i).to_vec()).collect();
    let neighbors = cosine_neighbors(&user_vectors, &item_vectors, config.neighbors, binary);
    UserKnnModel { neighbors, binary }
}

impl UserKnnModel {
    /// Candidate score: similarity-weighted ratings of the nearest users.
    pub fn score_user(&self, m: &TrainMatrix, user: usize, out: &mut [f64]) {
        out.fill(0.0);
        for &(other, sim) in &self.neighbors[user] {
            for &(item, rating) in m.row(other) {
                let value = if self.binary { 1.0 } else { rating };
                out[item] += sim * value;
            }
        }
    }
}
