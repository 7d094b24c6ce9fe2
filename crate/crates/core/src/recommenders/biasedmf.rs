//! Biased matrix factorization fit by stochastic gradient descent.
//!
//! Rating model: `mu + b_u + b_i + p_u . q_i`. The per-sample loss is
//! `0.5 * (e^2 + reg * (b_u^2 + b_i^2 + |p_u|^2 + |q_i|^2))` with
//! `e = r - prediction`; the training objective is its sum over the
//! training entries. `mu` is the global mean rating and stays fixed.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TrainMatrix;
use crate::error::{Error, Result};
use crate::util::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasedMfConfig {
    pub factors: usize,
    pub epochs: usize,
    pub lr: f64,
    pub reg: f64,
}

impl Default for BiasedMfConfig {
    fn default() -> Self {
        BiasedMfConfig {
            factors: 20,
            epochs: 30,
            lr: 0.01,
            reg: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasedMfModel {
    pub factors: usize,
    pub global_mean: f64,
    pub user_bias: Vec<f64>,
    pub item_bias: Vec<f64>,
    /// Row-major `n_users x factors`.
    pub user_factors: Vec<f64>,
    /// Row-major `n_items x factors`.
    pub item_factors: Vec<f64>,
}

/// Gradient of the per-sample loss for one (user, item) entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGradient {
    pub user_bias: f64,
    pub item_bias: f64,
    pub user_factors: Vec<f64>,
    pub item_factors: Vec<f64>,
}

pub fn train_biasedmf(m: &TrainMatrix, config: &BiasedMfConfig, seed: u64) -> Result<BiasedMfModel> {
    train_with_trace(m, config, seed).map(|(model, _)| model)
}

/// Trains and returns the objective after every epoch.
pub fn train_with_trace(m: &TrainMatrix, config: &BiasedMfConfig, seed: u64) -> Result<(BiasedMfModel, Vec<f64>)> {
    let mut rng = rng(seed);
    let mut entries = m.entries();
    let global_mean = entries.iter().map(|e| e.2).sum::<f64>() / entries.len() as f64;
    let k = config.factors;
    let scale = 0.1;
    let mut init = |n: usize| -> Vec<f64> { (0..n * k).map(|_| rng.gen_range(-scale..scale)).collect() };
    let mut model = BiasedMfModel {
        factors: k,
        global_mean,
        user_bias: vec![0.0; m.n_users()],
        item_bias: vec![0.0; m.n_items()],
        user_factors: init(m.n_users()),
        item_factors: init(m.n_items()),
    };
    let mut trace = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        entries.shuffle(&mut rng);
        for &(u, i, r) in &entries {
            let grad = model.sample_gradient(u, i, r, config.reg);
            model.user_bias[u] -= config.lr * grad.user_bias;
            model.item_bias[i] -= config.lr * grad.item_bias;
            for f in 0..k {
                model.user_factors[u * k + f] -= config.lr * grad.user_factors[f];
                model.item_factors[i * k + f] -= config.lr * grad.item_factors[f];
            }
        }
        let objective = model.objective(m, config.reg);
        if !objective.is_finite() {
            return Err(Error::Divergence { lr: config.lr });
        }
        trace.push(objective);
    }
    Ok((model, trace))
}

impl BiasedMfModel {
    fn user_row(&self, u: usize) -> &[f64] {
        &self.user_factors[u * self.factors..(u + 1) * self.factors]
    }

    fn item_row(&self, i: usize) -> &[f64] {
        &self.item_factors[i * self.factors..(i + 1) * self.factors]
    }

    pub fn predict(&self, u: usize, i: usize) -> f64 {
        let dot: f64 = self.user_row(u).iter().zip(self.item_row(i)).map(|(a, b)| a * b).sum();
        self.global_mean + self.user_bias[u] + self.item_bias[i] + dot
    }

    pub fn sample_loss(&self, u: usize, i: usize, r: f64, reg: f64) -> f64 {
        let e = r - self.predict(u, i);
        let norms = self.user_bias[u].powi(2)
            + self.item_bias[i].powi(2)
            + self.user_row(u).iter().map(|x| x * x).sum::<f64>()
            + self.item_row(i).iter().map(|x| x * x).sum::<f64>();
        0.5 * (e * e + reg * norms)
    }

    pub fn sample_gradient(&self, u: usize, i: usize, r: f64, reg: f64) -> SampleGradient {
        let e = r - self.predict(u, i);
        let pu = self.user_row(u);
        let qi = self.item_row(i);
        SampleGradient {
            user_bias: -e + reg * self.user_bias[u],
            item_bias: -e + reg * self.item_bias[i],
            user_factors: pu.iter().zip(qi).map(|(p, q)| -e * q + reg * p).collect(),
            item_factors: pu.iter().zip(qi).map(|(p, q)| -e * p + reg * q).collect(),
        }
    }

    pub fn objective(&self, m: &TrainMatrix, reg: f64) -> f64 {
        m.entries().iter().map(|&(u, i, r)| self.sample_loss(u, i, r, reg)).sum()
    }

    pub fn score_user(&self, user: usize, out: &mut [f64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.predict(user, i);
        }
    }
}
