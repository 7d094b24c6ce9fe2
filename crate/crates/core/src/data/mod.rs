//! Interaction logs: the standardized `user,item,rating,timestamp` schema,
//! ingestion of raw logs, user filtering and per-user temporal splitting.

mod ingest;
mod split;

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::fmt_f64;

pub use ingest::{ingest_raw, ingest_reader, ColumnMap, DedupPolicy, EventWeightMap, IngestConfig};
pub use split::{dataset_stats, filter_min_interactions, temporal_per_user_split, DatasetStats, SplitPair};

/// Activity floor applied to every dataset when it is loaded for an experiment.
pub const MIN_USER_INTERACTIONS: usize = 10;
pub const DEFAULT_TEST_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub user: String,
    pub item: String,
    pub rating: f64,
    pub timestamp: i64,
}

impl Interaction {
    pub fn new(user: impl Into<String>, item: impl Into<String>, rating: f64, timestamp: i64) -> Self {
        Interaction {
            user: user.into(),
            item: item.into(),
            rating,
            timestamp,
        }
    }
}

/// Whether ratings are explicit scores or summed implicit event weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feedback {
    #[default]
    Explicit,
    Implicit,
}

/// Bidirectional map between external ids and dense indices, assigned in
/// first-appearance order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdMap {
    index: HashMap<String, usize>,
    ids: Vec<String>,
}

impl IdMap {
    pub fn insert(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.index.insert(id.to_string(), i);
        self.ids.push(id.to_string());
        i
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, dense: usize) -> &str {
        &self.ids[dense]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// An ordered interaction log with dense id maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feedback: Feedback,
    interactions: Vec<Interaction>,
    users: IdMap,
    items: IdMap,
}

impl Dataset {
    pub fn new(name: impl Into<String>, interactions: Vec<Interaction>) -> Self {
        let mut users = IdMap::default();
        let mut items = IdMap::default();
        for it in &interactions {
            users.insert(&it.user);
            items.insert(&it.item);
        }
        Dataset {
            name: name.into(),
            feedback: Feedback::Explicit,
            interactions,
            users,
            items,
        }
    }

    pub fn with_feedback(mut self, feedback: Feedback) -> Self {
        self.feedback = feedback;
        self
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn users(&self) -> &IdMap {
        &self.users
    }

    pub fn items(&self) -> &IdMap {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }

    /// Interaction positions grouped by dense user index, in log order.
    pub fn by_user(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.users.len()];
        for (pos, it) in self.interactions.iter().enumerate() {
            let u = self.users.get(&it.user).expect("user indexed at construction");
            groups[u].push(pos);
        }
        groups
    }

    /// Builds a dataset restricted to the interactions selected by `keep`,
    /// preserving order and recompacting the id maps.
    pub fn retain(&self, mut keep: impl FnMut(&Interaction) -> bool) -> Dataset {
        let kept = self.interactions.iter().filter(|it| keep(it)).cloned().collect();
        Dataset::new(self.name.clone(), kept).with_feedback(self.feedback)
    }

    pub fn read_csv(name: &str, path: &Path) -> Result<Dataset> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv_from(name, file)
    }

    /// Reads the standardized four-column CSV.
    pub fn read_csv_from(name: &str, reader: impl Read) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["user", "item", "rating", "timestamp"];
        if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::Schema(format!(
                "expected header `user,item,rating,timestamp`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut interactions = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let rating: f64 = record[2].parse().map_err(|_| Error::Parse {
                row,
                msg: format!("rating `{}` is not numeric", &record[2]),
            })?;
            if !rating.is_finite() || rating <= 0.0 {
                return Err(Error::Parse {
                    row,
                    msg: format!("rating {rating} must be finite and > 0"),
                });
            }
            let timestamp: i64 = record[3].parse().map_err(|_| Error::Parse {
                row,
                msg: format!("timestamp `{}` is not an integer", &record[3]),
            })?;
            interactions.push(Interaction::new(&record[0], &record[1], rating, timestamp));
        }
        Ok(Dataset::new(name, interactions))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(std::io::BufWriter::new(file))
    }

    pub fn write_csv_to(&self, writer: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["user", "item", "rating", "timestamp"])?;
        for it in &self.interactions {
            wtr.write_record([
                it.user.as_str(),
                it.item.as_str(),
                &fmt_f64(it.rating),
                &it.timestamp.to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dense_indices_follow_first_appearance() {
        let ds = Dataset::new(
            "t",
            vec![
                Interaction::new("u2", "b", 1.0, 0),
                Interaction::new("u1", "a", 1.0, 1),
                Interaction::new("u2", "a", 1.0, 2),
            ],
        );
        assert_eq!(ds.users().ids(), ["u2", "u1"]);
        assert_eq!(ds.items().ids(), ["b", "a"]);
        assert_eq!(ds.by_user(), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn csv_rejects_bad_header() {
        let err = Dataset::read_csv_from("x", "u,i,r,t\n1,2,3,4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn csv_reports_row_of_bad_rating() {
        let text = "user,item,rating,timestamp\na,b,1,1\na,c,oops,2\n";
        match Dataset::read_csv_from("x", text.as_bytes()).unwrap_err() {
            Error::Parse { row, .. } => assert_eq!(row, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn dense_index_round_trip(ids in proptest::collection::vec("[a-e]{1,3}", 1..40)) {
            let interactions = ids.iter().enumerate()
                .map(|(t, u)| Interaction::new(u.clone(), format!("i{}", t % 7), 1.0, t as i64))
                .collect();
            let ds = Dataset::new("p", interactions);
            for id in &ids {
                let dense = ds.users().get(id).unwrap();
                prop_assert_eq!(ds.users().id(dense), id.as_str());
            }
            prop_assert!(ds.users().ids().iter().enumerate().all(|(i, id)| ds.users().get(id) == Some(i)));
        }

        #[test]
        fn csv_round_trip(rows in proptest::collection::vec(("[a-d]", "[p-t]", 1u8..6, 0i64..1000), 1..30)) {
            let interactions: Vec<_> = rows.iter()
                .map(|(u, i, r, t)| Interaction::new(u.clone(), i.clone(), *r as f64 * 0.5, *t))
                .collect();
            let ds = Dataset::new("rt", interactions);
            let mut buf = Vec::new();
            ds.write_csv_to(&mut buf).unwrap();
            let back = Dataset::read_csv_from("rt", buf.as_slice()).unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
