//! Item-based k-nearest-neighbors with cosine similarity.

use serde::{Deserialize, Serialize};

use super::{cosine_neighbors, TrainMatrix, VectorMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemKnnConfig {
    pub neighbors: usize,
    #[serde(default)]
    pub vectors: VectorMode,
}

impl Default for ItemKnnConfig {
    fn default() -> Self {
        ItemKnnConfig {
            neighbors: 20,
            vectors: VectorMode::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemKnnModel {
    /// Per item: its most similar items with their cosine similarity.
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub binary: bool,
}

pub fn train_itemknn(m: &TrainMatrix, config: &ItemKnnConfig) -> ItemKnnModel {
    let binary = m.binary_vectors(config.vectors);
    let item_vectors: Vec<Vec<(usize, f64)>> = (0..m.n_items()).map(|i| m.col(i).to_vec()).collect();
    let user_vectors: Vec<Vec<(usize, f64)>> = (0..m.n_users()).map(|u| m.row(u).to_vec()).collect();
    let neighbors = cosine_neighbors(&item_vectors, &user_vectors, config.neighbors, binary);
    ItemKnnModel { neighbors, binary }
}

impl ItemKnnModel {
    /// Candidate score: summed similarity to the items in the user's history.
    pub fn score_user(&self, m: &TrainMatrix, user: usize, out: &mut [f64]) {
        out.fill(0.0);
        for &(item, _) in m.row(user) {
            for &(other, sim) in &self.neighbors[item] {
                out[other] += sim;
            }
        }
    }
}
