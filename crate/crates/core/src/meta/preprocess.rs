//! Column standardization and one-hot encoding, fitted on training rows.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::mean_std;

/// Per-column mean and scale. Constant columns get scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

pub fn standardize_fit(rows: &[Vec<f64>]) -> Result<ScalerParams> {
    let width = rows.first().map(Vec::len).ok_or_else(|| Error::Precondition("cannot fit a scaler on zero rows".into()))?;
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Precondition("ragged rows passed to the scaler".into()));
    }
    let mut mean = Vec::with_capacity(width);
    let mut scale = Vec::with_capacity(width);
    for j in 0..width {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            // exact zeros after centering, whatever the rounding of the mean
            mean.push(lo);
            scale.push(1.0);
        } else {
            let (m, s) = mean_std(&col);
            mean.push(m);
            scale.push(if s > 0.0 { s } else { 1.0 });
        }
    }
    Ok(ScalerParams { mean, scale })
}

impl ScalerParams {
    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

pub fn standardize_apply(params: &ScalerParams, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| params.apply_row(r)).collect()
}

/// Ordered category list per categorical column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneHotMap {
    pub categories: Vec<Vec<String>>,
}

/// Categories are sorted so the encoding does not depend on row order.
pub fn one_hot_fit(rows: &[Vec<String>]) -> Result<OneHotMap> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Precondition("ragged rows passed to the one-hot encoder".into()));
    }
    let categories = (0..width)
        .map(|j| {
            rows.iter()
                .map(|r| r[j].clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    Ok(OneHotMap { categories })
}

impl OneHotMap {
    pub fn width(&self) -> usize {
        self.categories.iter().map(Vec::len).sum()
    }

    /// Indicator columns; an unseen value leaves its block all zero.
    pub fn apply_row(&self, row: &[String]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.width());
        for (value, cats) in row.iter().zip(&self.categories) {
            out.extend(cats.iter().map(|c| if c == value { 1.0 } else { 0.0 }));
        }
        out
    }

    /// `<column>=<category>` names for the indicator columns.
    pub fn names(&self, columns: &[String]) -> Vec<String> {
        columns
            .iter()
            .zip(&self.categories)
            .flat_map(|(col, cats)| cats.iter().map(move |c| format!("{col}={c}")))
            .collect()
    }
}

pub fn one_hot_apply(map: &OneHotMap, rows: &[Vec<String>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| map.apply_row(r)).collect()
}
