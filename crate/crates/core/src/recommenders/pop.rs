//! Popularity baseline: every user receives the globally most interacted
//! items.

use serde::{Deserialize, Serialize};

use super::TrainMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopModel {
    pub counts: Vec<f64>,
}

pub fn train_pop(m: &TrainMatrix) -> PopModel {
    let counts = m.item_counts().iter().map(|&c| c as f64).collect();
    PopModel { counts }
}

impl PopModel {
    pub fn score_user(&self, out: &mut [f64]) {
        out.copy_from_slice(&self.counts);
    }
}
