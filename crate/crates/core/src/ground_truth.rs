//! Per-user NDCG@10 ground truth and the single-best / virtual-best baselines.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::data::SplitPair;
use crate::error::{Error, Result};
use crate::recommenders::{recommend_dense, RecommenderModel, TrainMatrix};
use crate::util::{argmax, fmt_f64};

/// Cutoff used for every list in the ground truth.
pub const CUTOFF: usize = 10;

/// NDCG@k with binary gains. IDCG is truncated at `min(k, |relevant|)`.
pub fn ndcg_at_k<S: AsRef<str>>(ranking: &[S], relevant: &HashSet<String>, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Precondition("ndcg cutoff must be at least 1".into()));
    }
    if relevant.is_empty() {
        return Err(Error::Undefined("ndcg of a user without relevant items".into()));
    }
    let dcg: f64 = ranking
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, item)| relevant.contains(item.as_ref()))
        .map(|(r, _)| discount(r))
        .sum();
    let idcg: f64 = (0..k.min(relevant.len())).map(discount).sum();
    Ok(dcg / idcg)
}

/// `1 / log2(rank + 1)` for a 0-based position.
fn discount(position: usize) -> f64 {
    1.0 / ((position + 2) as f64).log2()
}

/// Users × algorithms grid of NDCG@10 values.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    users: Vec<String>,
    algorithms: Vec<String>,
    values: Vec<f64>,
}

impl PerformanceMatrix {
    pub fn new(users: Vec<String>, algorithms: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != users.len() * algorithms.len() {
            return Err(Error::Precondition(format!(
                "matrix has {} values for {} users x {} algorithms",
                values.len(),
                users.len(),
                algorithms.len()
            )));
        }
        check_unique(&users, "user")?;
        check_unique(&algorithms, "algorithm")?;
        if algorithms.is_empty() {
            return Err(Error::Precondition("performance matrix needs at least one algorithm".into()));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Precondition(format!("performance value {v} outside [0, 1]")));
        }
        Ok(PerformanceMatrix {
            users,
            algorithms,
            values,
        })
    }

    pub fn from_rows(users: Vec<String>, algorithms: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != algorithms.len()) {
            return Err(Error::Precondition("ragged performance rows".into()));
        }
        Self::new(users, algorithms, rows.concat())
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn algorithms(&self) -> &[String] {
        &self.algorithms
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_algorithms(&self) -> usize {
        self.algorithms.len()
    }

    pub fn get(&self, user: usize, algorithm: usize) -> f64 {
        self.values[user * self.algorithms.len() + algorithm]
    }

    pub fn row(&self, user: usize) -> &[f64] {
        let n = self.algorithms.len();
        &self.values[user * n..(user + 1) * n]
    }

    pub fn user_index(&self, user: &str) -> Option<usize> {
        self.users.iter().position(|u| u == user)
    }

    pub fn algorithm_index(&self, algorithm: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a == algorithm)
    }

    /// Restricts the matrix to the given user rows, in the given order.
    pub fn select_users(&self, rows: &[usize]) -> PerformanceMatrix {
        PerformanceMatrix {
            users: rows.iter().map(|&r| self.users[r].clone()).collect(),
            algorithms: self.algorithms.clone(),
            values: rows.iter().flat_map(|&r| self.row(r).iter().copied()).collect(),
        }
    }

    /// Restricts the matrix to the given algorithm columns, in the given order.
    pub fn select_algorithms(&self, cols: &[usize]) -> PerformanceMatrix {
        PerformanceMatrix {
            users: self.users.clone(),
            algorithms: cols.iter().map(|&c| self.algorithms[c].clone()).collect(),
            values: (0..self.n_users())
                .flat_map(|u| cols.iter().map(move |&c| (u, c)))
                .map(|(u, c)| self.get(u, c))
                .collect(),
        }
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.n_users() as f64;
        (0..self.n_algorithms())
            .map(|a| (0..self.n_users()).map(|u| self.get(u, a)).sum::<f64>() / n)
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file)
    }

    pub fn write_csv_to(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["user".to_string()];
        header.extend(self.algorithms.iter().cloned());
        w.write_record(&header)?;
        for (u, user) in self.users.iter().enumerate() {
            let mut record = vec![user.clone()];
            record.extend(self.row(u).iter().map(|&v| fmt_f64(v)));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<performance matrix>", e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv_from(file)
    }

    pub fn read_csv_from(reader: impl Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.get(0) != Some("user") || header.len() < 2 {
            return Err(Error::Schema("performance matrix header must be `user,<algorithm>...`".into()));
        }
        let algorithms: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut users = Vec::new();
        let mut values = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record?;
            users.push(record[0].to_string());
            for field in record.iter().skip(1) {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    row,
                    msg: format!("`{field}` is not a number"),
                })?;
                values.push(v);
            }
        }
        Self::new(users, algorithms, values)
    }
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    match labels.iter().find(|l| !seen.insert(l.as_str())) {
        Some(dup) => Err(Error::Precondition(format!("duplicate {what} label `{dup}`"))),
        None => Ok(()),
    }
}

/// Counts of test users left out of the matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvaluationCoverage {
    pub evaluated: usize,
    /// Test users with no training history.
    pub skipped_cold: usize,
    /// Test users whose relevant set is empty.
    pub skipped_empty: usize,
}

/// Scores every test user with every trained model.
///
/// `models` must have been trained on `m`, which in turn was built from
/// `split.train`. Seen items are excluded from the lists.
pub fn evaluate_portfolio(
    split: &SplitPair,
    m: &TrainMatrix,
    models: &[RecommenderModel],
) -> Result<(PerformanceMatrix, EvaluationCoverage)> {
    let mut relevant: BTreeMap<usize, (String, HashSet<String>)> = BTreeMap::new();
    let mut report = EvaluationCoverage::default();
    for (t, positions) in split.test.by_user().iter().enumerate() {
        let user = split.test.users().id(t);
        let items: HashSet<String> = positions
            .iter()
            .map(|&p| split.test.interactions()[p].item.clone())
            .collect();
        match m.users().get(user) {
            None => report.skipped_cold += 1,
            Some(_) if items.is_empty() => report.skipped_empty += 1,
            Some(dense) => {
                relevant.insert(dense, (user.to_string(), items));
            }
        }
    }
    if report.skipped_cold > 0 {
        log::warn!("{} test users have no training history and were skipped", report.skipped_cold);
    }
    let rows: Vec<(usize, &(String, HashSet<String>))> = relevant.iter().map(|(&d, v)| (d, v)).collect();
    let values: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|&(dense, (_, items))| {
            models
                .iter()
                .map(|model| {
                    let ranked = recommend_dense(model, m, dense, CUTOFF, true);
                    let ids: Vec<&str> = ranked.iter().map(|&(i, _)| m.items().id(i)).collect();
                    ndcg_at_k(&ids, items, CUTOFF)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    report.evaluated = rows.len();
    let users = rows.iter().map(|(_, (u, _))| u.clone()).collect();
    let algorithms = models.iter().map(|m| m.algorithm.id().to_string()).collect();
    Ok((PerformanceMatrix::from_rows(users, algorithms, &values)?, report))
}

/// Single best algorithm: highest column mean, ties to the lowest index.
pub fn sba(pm: &PerformanceMatrix) -> (usize, f64) {
    let means = pm.column_means();
    let best = argmax(&means).expect("matrix has at least one algorithm");
    (best, means[best])
}

/// Virtual best: mean over users of the row maximum.
pub fn vba(pm: &PerformanceMatrix) -> f64 {
    let total: f64 = (0..pm.n_users())
        .map(|u| pm.row(u).iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum();
    total / pm.n_users() as f64
}

/// Per-user index of the best algorithm, ties to the lowest index.
pub fn oracle_choices(pm: &PerformanceMatrix) -> Vec<usize> {
    (0..pm.n_users()).map(|u| argmax(pm.row(u)).expect("non-empty row")).collect()
}

/// Percentage of the SBA→VBA gap closed by a selector.
pub fn gap_closed(selector_mean: f64, sba_mean: f64, vba_mean: f64) -> Result<f64> {
    if vba_mean <= sba_mean {
        return Err(Error::Undefined(format!(
            "gap closed needs VBA > SBA (VBA {vba_mean}, SBA {sba_mean})"
        )));
    }
    Ok(100.0 * (selector_mean - sba_mean) / (vba_mean - sba_mean))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorOutcome {
    /// Chosen algorithm index per matrix row.
    pub choices: Vec<usize>,
    /// Matrix value at (user, chosen algorithm).
    pub achieved: Vec<f64>,
    pub mean: f64,
}

/// Looks up the achieved score of each user's chosen algorithm.
pub fn apply_selector(pm: &PerformanceMatrix, choices: &[usize]) -> Result<SelectorOutcome> {
    if choices.len() != pm.n_users() {
        return Err(Error::Precondition(format!(
            "{} choices for {} users",
            choices.len(),
            pm.n_users()
        )));
    }
    if let Some(&bad) = choices.iter().find(|&&c| c >= pm.n_algorithms()) {
        return Err(Error::Precondition(format!("algorithm index {bad} out of range")));
    }
    let achieved: Vec<f64> = choices.iter().enumerate().map(|(u, &a)| pm.get(u, a)).collect();
    let mean = achieved.iter().sum::<f64>() / achieved.len().max(1) as f64;
    Ok(SelectorOutcome {
        choices: choices.to_vec(),
        achieved,
        mean,
    })
}
