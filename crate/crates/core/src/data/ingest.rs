use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dataset, Feedback, Interaction};
use crate::error::{Error, Result};

/// Mapping from implicit event labels to positive interaction weights.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct EventWeightMap(BTreeMap<String, f64>);

impl EventWeightMap {
    pub fn new(weights: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((label, w)) = weights.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::config(format!("event weight for `{label}` must be > 0, got {w}")));
        }
        Ok(EventWeightMap(weights))
    }

    /// view / add-to-cart / transaction weights used for e-commerce event logs.
    pub fn retailrocket() -> Self {
        let weights = [("view", 1.0), ("addtocart", 2.0), ("transaction", 4.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        EventWeightMap(weights)
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.0.get(label).copied()
    }
}

impl TryFrom<BTreeMap<String, f64>> for EventWeightMap {
    type Error = Error;
    fn try_from(value: BTreeMap<String, f64>) -> Result<Self> {
        EventWeightMap::new(value)
    }
}

impl From<EventWeightMap> for BTreeMap<String, f64> {
    fn from(value: EventWeightMap) -> Self {
        value.0
    }
}

/// How duplicate (user, item) rows are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DedupPolicy {
    /// Mean of the ratings (explicit feedback).
    Mean,
    /// Sum of the weights (implicit feedback).
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnMap {
    pub user: String,
    pub item: String,
    #[serde(default)]
    pub rating: Option<String>,
    #[serde(default)]
    pub timestamp: Option<String>,
    /// Event-type column, mapped to a rating through `event_weights`.
    #[serde(default)]
    pub event: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            user: "user".into(),
            item: "item".into(),
            rating: Some("rating".into()),
            timestamp: Some("timestamp".into()),
            event: None,
        }
    }
}

/// Ingestion settings for one raw source file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestConfig {
    pub name: String,
    #[serde(default)]
    pub feedback: Feedback,
    #[serde(default)]
    pub dedup: Option<DedupPolicy>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default)]
    pub columns: ColumnMap,
    #[serde(default)]
    pub event_weights: Option<EventWeightMap>,
}

fn default_delimiter() -> char {
    ','
}

impl IngestConfig {
    /// Identity configuration for an already-standardized file.
    pub fn standardized(name: &str) -> Self {
        IngestConfig {
            name: name.to_string(),
            feedback: Feedback::Explicit,
            dedup: None,
            delimiter: ',',
            columns: ColumnMap::default(),
            event_weights: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("ingest config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn dedup_policy(&self) -> DedupPolicy {
        self.dedup.unwrap_or(match self.feedback {
            Feedback::Explicit => DedupPolicy::Mean,
            Feedback::Implicit => DedupPolicy::Sum,
        })
    }
}

pub fn ingest_raw(path: &Path, cfg: &IngestConfig) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_reader(file, cfg)
}

/// Reads a raw delimited log, maps events to weights, fills missing
/// timestamps with the row sequence and merges duplicate (user, item) pairs.
pub fn ingest_reader(reader: impl Read, cfg: &IngestConfig) -> Result<Dataset> {
    if !cfg.delimiter.is_ascii() {
        return Err(Error::config("delimiter must be a single ASCII character"));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(cfg.delimiter as u8)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let require = |name: &str| {
        find(name).ok_or_else(|| Error::Schema(format!("missing mandatory column `{name}`")))
    };
    let optional = |name: &Option<String>| -> Result<Option<usize>> {
        name.as_deref()
            .map(|n| find(n).ok_or_else(|| Error::Schema(format!("missing configured column `{n}`"))))
            .transpose()
    };

    let user_col = require(&cfg.columns.user)?;
    let item_col = require(&cfg.columns.item)?;
    let event_col = optional(&cfg.columns.event)?;
    // Rating and timestamp columns are optional: absent ratings default to
    // 1.0 and absent timestamps to the row sequence.
    let rating_col = match &cfg.columns.rating {
        Some(n) if event_col.is_none() => find(n),
        _ => None,
    };
    let ts_col = cfg.columns.timestamp.as_deref().and_then(find);
    if event_col.is_some() && cfg.event_weights.is_none() {
        return Err(Error::config("event column configured without event_weights"));
    }

    let policy = cfg.dedup_policy();
    // (user, item) -> (accumulated rating, count, latest timestamp)
    let mut merged: HashMap<(String, String), (f64, usize, i64)> = HashMap::new();
    let mut order: Vec<(String, String)> = Vec::new();

    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let field = |col: usize| record.get(col).unwrap_or("");
        let user = field(user_col);
        let item = field(item_col);
        if user.is_empty() || item.is_empty() {
            return Err(Error::Parse {
                row,
                msg: "empty user or item id".into(),
            });
        }
        let rating = if let Some(col) = event_col {
            let label = field(col);
            cfg.event_weights
                .as_ref()
                .and_then(|w| w.get(label))
                .ok_or_else(|| Error::Parse {
                    row,
                    msg: format!("unknown event type `{label}`"),
                })?
        } else if let Some(col) = rating_col {
            let raw = field(col);
            let r: f64 = raw.parse().map_err(|_| Error::Parse {
                row,
                msg: format!("rating `{raw}` is not numeric"),
            })?;
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::Parse {
                    row,
                    msg: format!("rating {r} must be finite and > 0"),
                });
            }
            r
        } else {
            1.0
        };
        let timestamp = match ts_col {
            Some(col) => {
                let raw = field(col);
                parse_timestamp(raw).ok_or_else(|| Error::Parse {
                    row,
                    msg: format!("timestamp `{raw}` is not an integer"),
                })?
            }
            None => row as i64,
        };

        let key = (user.to_string(), item.to_string());
        match merged.get_mut(&key) {
            Some(entry) => {
                entry.0 += rating;
                entry.1 += 1;
                entry.2 = entry.2.max(timestamp);
            }
            None => {
                merged.insert(key.clone(), (rating, 1, timestamp));
                order.push(key);
            }
        }
    }

    let interactions = order
        .into_iter()
        .map(|key| {
            let (sum, count, ts) = merged[&key];
            let rating = match policy {
                DedupPolicy::Mean => sum / count as f64,
                DedupPolicy::Sum => sum,
            };
            Interaction::new(key.0, key.1, rating, ts)
        })
        .collect();
    Ok(Dataset::new(cfg.name.clone(), interactions).with_feedback(cfg.feedback))
}

/// Integer timestamps; integral floats (`1.7e9`, `123.0`) are accepted too.
fn parse_timestamp(raw: &str) -> Option<i64> {
    raw.parse::<i64>().ok().or_else(|| {
        let f: f64 = raw.parse().ok()?;
        (f.is_finite() && f.fract() == 0.0).then_some(f as i64)
    })
}
