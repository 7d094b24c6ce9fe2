//! Fifteen per-user meta-features computed from the training history.
//!
//! Standard deviations use the population convention (divide by n) so they
//! are defined for single-interaction users.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::util::{fmt_f64, mean_std, median};

pub const FEATURE_NAMES: [&str; 15] = [
    "num_interactions",
    "num_unique_items",
    "avg_rating",
    "std_rating",
    "min_rating",
    "max_rating",
    "median_rating",
    "rating_entropy",
    "history_duration_seconds",
    "first_interaction_ts",
    "last_interaction_ts",
    "avg_time_diff_interactions",
    "avg_item_pop_interacted",
    "median_item_pop_interacted",
    "std_item_pop_interacted",
];

/// Raw timestamp columns; their scale depends on the data source.
pub const RAW_TIMESTAMP_FEATURES: [&str; 2] = ["first_interaction_ts", "last_interaction_ts"];

pub type UserFeatureVector = [f64; 15];

/// Training-split interaction count per item.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ItemPopularityTable {
    counts: HashMap<String, usize>,
}

impl ItemPopularityTable {
    /// Count for `item`; items absent from the training split have 0.
    pub fn count(&self, item: &str) -> usize {
        self.counts.get(item).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

pub fn build_popularity_table(train: &Dataset) -> ItemPopularityTable {
    let mut counts = HashMap::new();
    for r in train.interactions() {
        *counts.entry(r.item.clone()).or_insert(0) += 1;
    }
    ItemPopularityTable { counts }
}

/// Shannon entropy in bits of the empirical distribution of distinct values.
pub fn rating_entropy(ratings: &[f64]) -> f64 {
    let mut bins: BTreeMap<u64, usize> = BTreeMap::new();
    for r in ratings {
        *bins.entry(r.to_bits()).or_insert(0) += 1;
    }
    let n = ratings.len() as f64;
    let h: f64 = bins
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    // keep a clean zero for degenerate distributions
    h.max(0.0)
}

pub fn compute_user_features(train: &Dataset, pop: &ItemPopularityTable, user: &str) -> Result<UserFeatureVector> {
    let dense = train
        .users()
        .get(user)
        .ok_or_else(|| Error::ColdStart(user.to_string()))?;
    let positions = &train.by_user()[dense];
    Ok(features_for(train, pop, positions))
}

fn features_for(train: &Dataset, pop: &ItemPopularityTable, positions: &[usize]) -> UserFeatureVector {
    let rows: Vec<_> = positions.iter().map(|&p| &train.interactions()[p]).collect();
    let ratings: Vec<f64> = rows.iter().map(|r| r.rating).collect();
    let unique: HashSet<&str> = rows.iter().map(|r| r.item.as_str()).collect();
    let (avg_rating, std_rating) = mean_std(&ratings);
    let min_rating = ratings.iter().copied().fold(f64::INFINITY, f64::min);
    let max_rating = ratings.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut ts: Vec<i64> = rows.iter().map(|r| r.timestamp).collect();
    ts.sort_unstable();
    let first = ts[0];
    let last = ts[ts.len() - 1];
    let gaps: Vec<f64> = ts.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let avg_gap = if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    };

    let pops: Vec<f64> = rows.iter().map(|r| pop.count(&r.item) as f64).collect();
    let (avg_pop, std_pop) = mean_std(&pops);

    [
        rows.len() as f64,
        unique.len() as f64,
        avg_rating,
        std_rating,
        min_rating,
        max_rating,
        median(&ratings),
        rating_entropy(&ratings),
        (last - first) as f64,
        first as f64,
        last as f64,
        avg_gap,
        avg_pop,
        median(&pops),
        std_pop,
    ]
}

/// Feature vectors for every user of a training split.
#[derive(Debug, Clone, PartialEq)]
pub struct UserFeatureTable {
    pub users: Vec<String>,
    pub rows: Vec<UserFeatureVector>,
}

impl UserFeatureTable {
    pub fn index(&self) -> HashMap<&str, usize> {
        self.users.iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect()
    }

    pub fn get(&self, user: &str) -> Option<&UserFeatureVector> {
        self.users.iter().position(|u| u == user).map(|i| &self.rows[i])
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file)
    }

    pub fn write_csv_to(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["user"];
        header.extend(FEATURE_NAMES);
        w.write_record(&header)?;
        for (user, row) in self.users.iter().zip(&self.rows) {
            let mut record = vec![user.clone()];
            record.extend(row.iter().map(|&v| fmt_f64(v)));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<user features>", e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv_from(file)
    }

    pub fn read_csv_from(reader: impl Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let expected: Vec<&str> = std::iter::once("user").chain(FEATURE_NAMES).collect();
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Schema("user feature header does not match the 15 named columns".into()));
        }
        let mut table = UserFeatureTable {
            users: Vec::new(),
            rows: Vec::new(),
        };
        for (row, record) in r.records().enumerate() {
            let record = record?;
            let mut values = [0.0; 15];
            for (slot, field) in values.iter_mut().zip(record.iter().skip(1)) {
                *slot = field.parse().map_err(|_| Error::Parse {
                    row,
                    msg: format!("`{field}` is not a number"),
                })?;
            }
            table.users.push(record[0].to_string());
            table.rows.push(values);
        }
        Ok(table)
    }
}

/// Features for every training user, in the split's user order.
pub fn compute_feature_table(train: &Dataset) -> UserFeatureTable {
    let pop = build_popularity_table(train);
    let by_user = train.by_user();
    let rows = by_user.par_iter().map(|positions| features_for(train, &pop, positions)).collect();
    UserFeatureTable {
        users: train.users().ids().to_vec(),
        rows,
    }
}
