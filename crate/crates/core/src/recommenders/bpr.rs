//! Bayesian personalized ranking: pairwise SGD on (user, positive,
//! negative) triples.
//!
//! For a triple the model maximizes `ln sigmoid(x_ui - x_uj) - reg/2 *
//! (|p_u|^2 + |q_i|^2 + |q_j|^2)` where `x_ui = p_u . q_i`. Negatives are
//! drawn uniformly from the items the user has not seen.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TrainMatrix;
use crate::error::{Error, Result};
use crate::util::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BprConfig {
    pub factors: usize,
    pub epochs: usize,
    pub lr: f64,
    pub reg: f64,
}

impl Default for BprConfig {
    fn default() -> Self {
        BprConfig {
            factors: 20,
            epochs: 30,
            lr: 0.05,
            reg: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BprModel {
    pub factors: usize,
    pub user_factors: Vec<f64>,
    pub item_factors: Vec<f64>,
}

/// Gradient of the triple objective with respect to `p_u`, `q_i`, `q_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleGradient {
    pub user: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln sigmoid(d)`, stable for large |d|.
pub fn log_sigmoid(d: f64) -> f64 {
    if d >= 0.0 {
        -(-d).exp().ln_1p()
    } else {
        d - d.exp().ln_1p()
    }
}

/// Derivative of `ln sigmoid(d)` with respect to `d`.
pub fn log_sigmoid_grad(d: f64) -> f64 {
    sigmoid(-d)
}

pub fn train_bpr(m: &TrainMatrix, config: &BprConfig, seed: u64) -> Result<BprModel> {
    let mut rng = rng(seed);
    let k = config.factors;
    let mut model = BprModel {
        factors: k,
        user_factors: (0..m.n_users() * k).map(|_| rng.gen_range(-0.1..0.1)).collect(),
        item_factors: (0..m.n_items() * k).map(|_| rng.gen_range(-0.1..0.1)).collect(),
    };
    let entries = m.entries();
    let n_items = m.n_items();
    for _ in 0..config.epochs {
        for _ in 0..entries.len() {
            let (u, i, _) = entries[rng.gen_range(0..entries.len())];
            if m.row(u).len() >= n_items {
                continue;
            }
            let mut j = rng.gen_range(0..n_items);
            while m.has_seen(u, j) {
                j = rng.gen_range(0..n_items);
            }
            let grad = model.triple_gradient(u, i, j, config.reg);
            // gradient ascent on the triple objective
            for f in 0..k {
                model.user_factors[u * k + f] += config.lr * grad.user[f];
                model.item_factors[i * k + f] += config.lr * grad.positive[f];
                model.item_factors[j * k + f] += config.lr * grad.negative[f];
            }
        }
        if model.user_factors.iter().chain(&model.item_factors).any(|v| !v.is_finite()) {
            return Err(Error::Divergence { lr: config.lr });
        }
    }
    Ok(model)
}

impl BprModel {
    fn user_row(&self, u: usize) -> &[f64] {
        &self.user_factors[u * self.factors..(u + 1) * self.factors]
    }

    fn item_row(&self, i: usize) -> &[f64] {
        &self.item_factors[i * self.factors..(i + 1) * self.factors]
    }

    pub fn score(&self, u: usize, i: usize) -> f64 {
        self.user_row(u).iter().zip(self.item_row(i)).map(|(a, b)| a * b).sum()
    }

    pub fn triple_objective(&self, u: usize, i: usize, j: usize, reg: f64) -> f64 {
        let d = self.score(u, i) - self.score(u, j);
        let norms: f64 = [self.user_row(u), self.item_row(i), self.item_row(j)]
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v * v)
            .sum();
        log_sigmoid(d) - 0.5 * reg * norms
    }

    pub fn triple_gradient(&self, u: usize, i: usize, j: usize, reg: f64) -> TripleGradient {
        let d = self.score(u, i) - self.score(u, j);
        let g = log_sigmoid_grad(d);
        let p = self.user_row(u);
        let qi = self.item_row(i);
        let qj = self.item_row(j);
        TripleGradient {
            user: (0..self.factors).map(|f| g * (qi[f] - qj[f]) - reg * p[f]).collect(),
            positive: (0..self.factors).map(|f| g * p[f] - reg * qi[f]).collect(),
            negative: (0..self.factors).map(|f| -g * p[f] - reg * qj[f]).collect(),
        }
    }

    pub fn score_user(&self, user: usize, out: &mut [f64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.score(user, i);
        }
    }
}
