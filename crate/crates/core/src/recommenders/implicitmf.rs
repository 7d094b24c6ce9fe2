//! Implicit-feedback matrix factorization by alternating least squares.
//!
//! Every (user, item) cell carries a preference `p` (1 if observed, else 0)
//! and a confidence `c = 1 + alpha * rating` (1 for unobserved cells). The
//! objective is `sum c (p - x_u . y_i)^2 + reg (sum |x_u|^2 + sum |y_i|^2)`
//! and each half-step solves the regularized normal equations exactly.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TrainMatrix;
use crate::error::{Error, Result};
use crate::util::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplicitMfConfig {
    pub factors: usize,
    pub iters: usize,
    pub reg: f64,
    pub alpha: f64,
}

impl Default for ImplicitMfConfig {
    fn default() -> Self {
        ImplicitMfConfig {
            factors: 20,
            iters: 15,
            reg: 0.1,
            alpha: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitMfModel {
    pub factors: usize,
    /// Row-major `n_users x factors`.
    pub user_factors: Vec<f64>,
    /// Row-major `n_items x factors`.
    pub item_factors: Vec<f64>,
}

/// Which side of the factorization a half-step updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Users,
    Items,
}

pub fn train_implicitmf(m: &TrainMatrix, config: &ImplicitMfConfig, seed: u64) -> Result<ImplicitMfModel> {
    if config.reg <= 0.0 {
        return Err(Error::Numerical(format!("ALS needs reg > 0, got {}", config.reg)));
    }
    let mut model = ImplicitMfModel::init(m, config.factors, seed);
    for _ in 0..config.iters {
        model.half_step(m, config, Side::Users)?;
        model.half_step(m, config, Side::Items)?;
    }
    Ok(model)
}

impl ImplicitMfModel {
    /// Small random item factors; user factors start at zero and are solved
    /// by the first half-step.
    pub fn init(m: &TrainMatrix, factors: usize, seed: u64) -> Self {
        let mut rng = rng(seed);
        let item_factors = (0..m.n_items() * factors).map(|_| rng.gen_range(-0.1..0.1)).collect();
        ImplicitMfModel {
            factors,
            user_factors: vec![0.0; m.n_users() * factors],
            item_factors,
        }
    }

    fn fixed_side(&self, side: Side) -> &[f64] {
        match side {
            Side::Users => &self.item_factors,
            Side::Items => &self.user_factors,
        }
    }

    /// `F^T F + reg I` over the fixed side; shared by every row of a half-step.
    fn base_matrix(&self, config: &ImplicitMfConfig, side: Side) -> DMatrix<f64> {
        let k = self.factors;
        gram_matrix(self.fixed_side(side), k) + DMatrix::identity(k, k) * config.reg
    }

    fn accumulate(
        &self,
        m: &TrainMatrix,
        config: &ImplicitMfConfig,
        side: Side,
        row: usize,
        mut a: DMatrix<f64>,
    ) -> (DMatrix<f64>, DVector<f64>) {
        let k = self.factors;
        let fixed = self.fixed_side(side);
        let entries = match side {
            Side::Users => m.row(row),
            Side::Items => m.col(row),
        };
        let mut b = DVector::zeros(k);
        for &(other, rating) in entries {
            let y = DVector::from_column_slice(&fixed[other * k..(other + 1) * k]);
            let confidence = 1.0 + config.alpha * rating;
            a += &y * y.transpose() * (confidence - 1.0);
            b += &y * confidence;
        }
        (a, b)
    }

    /// The normal equations `A x = b` for one row of the solved side.
    pub fn normal_equations(
        &self,
        m: &TrainMatrix,
        config: &ImplicitMfConfig,
        side: Side,
        row: usize,
    ) -> (DMatrix<f64>, DVector<f64>) {
        self.accumulate(m, config, side, row, self.base_matrix(config, side))
    }

    /// Solves every row of one side given the other side.
    pub fn half_step(&mut self, m: &TrainMatrix, config: &ImplicitMfConfig, side: Side) -> Result<()> {
        let k = self.factors;
        if k == 0 {
            return Ok(());
        }
        let n_rows = match side {
            Side::Users => m.n_users(),
            Side::Items => m.n_items(),
        };
        let base = self.base_matrix(config, side);
        let mut solved = vec![0.0; n_rows * k];
        for row in 0..n_rows {
            let (a, b) = self.accumulate(m, config, side, row, base.clone());
            let chol = a
                .cholesky()
                .ok_or_else(|| Error::Numerical("ALS normal equations are not positive definite".into()))?;
            let x = chol.solve(&b);
            solved[row * k..(row + 1) * k].copy_from_slice(x.as_slice());
        }
        match side {
            Side::Users => self.user_factors = solved,
            Side::Items => self.item_factors = solved,
        }
        Ok(())
    }

    pub fn dot(&self, u: usize, i: usize) -> f64 {
        let k = self.factors;
        let x = &self.user_factors[u * k..(u + 1) * k];
        let y = &self.item_factors[i * k..(i + 1) * k];
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// Weighted objective over all cells, observed and unobserved.
    pub fn objective(&self, m: &TrainMatrix, config: &ImplicitMfConfig) -> f64 {
        let mut total = 0.0;
        for u in 0..m.n_users() {
            for i in 0..m.n_items() {
                let xy = self.dot(u, i);
                total += xy * xy;
            }
            for &(i, rating) in m.row(u) {
                let xy = self.dot(u, i);
                let confidence = 1.0 + config.alpha * rating;
                total += confidence * (1.0 - xy).powi(2) - xy * xy;
            }
        }
        let norms: f64 = self.user_factors.iter().chain(&self.item_factors).map(|v| v * v).sum();
        total + config.reg * norms
    }

    pub fn score_user(&self, user: usize, out: &mut [f64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.dot(user, i);
        }
    }
}

/// `F^T F` for a row-major factor matrix with `k` columns.
fn gram_matrix(factors: &[f64], k: usize) -> DMatrix<f64> {
    let n = if k == 0 { 0 } else { factors.len() / k };
    let f = DMatrix::from_row_slice(n, k, factors);
    f.transpose() * f
}
