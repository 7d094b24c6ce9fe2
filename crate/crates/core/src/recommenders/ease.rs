//! EASE: closed-form item-item linear autoencoder.
//!
//! With the binarized interaction matrix `X`, `G = X^T X + l2 I` and
//! `P = G^-1`, the weights are `B = I - P diag(1 / diag(P))` with a zero
//! diagonal, and user scores are `x_u B`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::TrainMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EaseConfig {
    pub l2: f64,
}

impl Default for EaseConfig {
    fn default() -> Self {
        EaseConfig { l2: 250.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EaseModel {
    pub n_items: usize,
    /// Row-major `n_items x n_items` weight matrix `B`.
    pub weights: Vec<f64>,
}

/// `X^T X + l2 I` over binarized interactions.
pub fn gram_matrix(m: &TrainMatrix, l2: f64) -> DMatrix<f64> {
    let n = m.n_items();
    let mut g = DMatrix::identity(n, n) * l2;
    for u in 0..m.n_users() {
        let row = m.row(u);
        for &(a, _) in row {
            for &(b, _) in row {
                g[(a, b)] += 1.0;
            }
        }
    }
    g
}

pub fn train_ease(m: &TrainMatrix, config: &EaseConfig) -> Result<EaseModel> {
    let l2 = config.l2;
    if !(l2 > 0.0 && l2.is_finite()) {
        return Err(Error::GramInversion { l2 });
    }
    let n = m.n_items();
    let p = gram_matrix(m, l2)
        .cholesky()
        .ok_or(Error::GramInversion { l2 })?
        .inverse();
    let mut weights = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                weights[i * n + j] = -p[(i, j)] / p[(j, j)];
            }
        }
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::GramInversion { l2 });
    }
    Ok(EaseModel { n_items: n, weights })
}

impl EaseModel {
    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[from * self.n_items + to]
    }

    pub fn score_user(&self, m: &TrainMatrix, user: usize, out: &mut [f64]) {
        out.fill(0.0);
        for &(item, _) in m.row(user) {
            let row = &self.weights[item * self.n_items..(item + 1) * self.n_items];
            for (slot, w) in out.iter_mut().zip(row) {
                *slot += w;
            }
        }
    }
}
