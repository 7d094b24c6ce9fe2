use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Drops users with fewer than `k` interactions. Applied once; items are not
/// filtered, only recompacted.
pub fn filter_min_interactions(ds: &Dataset, k: usize) -> Result<Dataset> {
    if k == 0 {
        return Err(Error::Precondition("activity floor k must be >= 1".into()));
    }
    let keep: HashSet<usize> = ds
        .by_user()
        .iter()
        .enumerate()
        .filter(|(_, rows)| rows.len() >= k)
        .map(|(u, _)| u)
        .collect();
    let out = ds.retain(|it| keep.contains(&ds.users().get(&it.user).expect("indexed")));
    if out.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "no user of `{}` has {k} or more interactions",
            ds.name
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    pub test_fraction: f64,
}

/// Number of most-recent interactions held out for a user with `n` events.
pub fn test_count(n: usize, test_fraction: f64) -> usize {
    // The epsilon keeps products such as 0.29 * 100 from flooring to 28.
    let raw = (test_fraction * n as f64 + 1e-9).floor() as usize;
    raw.max(1)
}

/// Per-user temporal split: each user's most recent interactions go to test.
/// Timestamp ties keep input order.
pub fn temporal_per_user_split(ds: &Dataset, test_fraction: f64) -> Result<SplitPair> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Precondition(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut is_test = vec![false; ds.len()];
    for (u, rows) in ds.by_user().into_iter().enumerate() {
        if rows.len() < 2 {
            return Err(Error::Precondition(format!(
                "user `{}` has {} interaction(s); splitting needs at least 2",
                ds.users().id(u),
                rows.len()
            )));
        }
        let mut sorted = rows;
        // stable: equal timestamps keep log order
        sorted.sort_by_key(|&pos| ds.interactions()[pos].timestamp);
        let n_test = test_count(sorted.len(), test_fraction);
        for &pos in &sorted[sorted.len() - n_test..] {
            is_test[pos] = true;
        }
    }
    let mut pos = 0;
    let train = ds.retain(|_| {
        pos += 1;
        !is_test[pos - 1]
    });
    let mut pos = 0;
    let test = ds.retain(|_| {
        pos += 1;
        is_test[pos - 1]
    });
    Ok(SplitPair {
        train,
        test,
        test_fraction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub users: usize,
    pub items: usize,
    pub interactions: usize,
    pub sparsity: f64,
}

impl DatasetStats {
    pub fn from_counts(users: usize, items: usize, interactions: usize) -> Self {
        let sparsity = 1.0 - interactions as f64 / (users as f64 * items as f64);
        DatasetStats {
            users,
            items,
            interactions,
            sparsity,
        }
    }
}

pub fn dataset_stats(ds: &Dataset) -> Result<DatasetStats> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset(format!("`{}` has no interactions", ds.name)));
    }
    Ok(DatasetStats::from_counts(ds.users().len(), ds.items().len(), ds.len()))
}
