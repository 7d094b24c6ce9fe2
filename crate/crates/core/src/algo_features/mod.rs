//! Algorithm meta-features: static code metrics, syntax-tree graph metrics,
//! performance landmarks on probe datasets, and conceptual tags.

pub mod conceptual;
pub mod landmark;
pub mod lexer;
pub mod metrics;
pub mod parser;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use conceptual::{load_conceptual_map, ConceptualTags};
pub use landmark::{landmark, prepare_probe, LandmarkRecord, Landmarks, Probe, TimingMode};
pub use metrics::{analyze_source, build_ast_graph, AstGraphMetrics, CodeMetrics};

use crate::error::{Error, Result};
use crate::recommenders::{algorithm_source, AlgorithmKind};
use crate::util::fmt_f64;

/// Feature families of the algorithm table, used to filter columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Code,
    Ast,
    Performance,
    Conceptual,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 4] = [
        FeatureGroup::Code,
        FeatureGroup::Ast,
        FeatureGroup::Performance,
        FeatureGroup::Conceptual,
    ];

    /// Column-name prefix in CSV output.
    pub fn prefix(self) -> &'static str {
        match self {
            FeatureGroup::Code => "code",
            FeatureGroup::Ast => "ast",
            FeatureGroup::Performance => "perf",
            FeatureGroup::Conceptual => "conceptual",
        }
    }

    fn from_column(name: &str) -> Option<FeatureGroup> {
        let (prefix, _) = name.split_once('.')?;
        Self::ALL.into_iter().find(|g| g.prefix() == prefix)
    }
}

/// Code and graph metrics for each algorithm's implementation file.
pub fn portfolio_static_metrics(kinds: &[AlgorithmKind]) -> Result<BTreeMap<String, (CodeMetrics, AstGraphMetrics)>> {
    let sources: Vec<(&str, &str)> = kinds.iter().map(|&k| algorithm_source(k)).collect();
    let mut by_file: HashMap<String, (CodeMetrics, AstGraphMetrics)> = metrics::analyze_all(&sources)?;
    Ok(kinds
        .iter()
        .map(|&k| {
            let file = algorithm_source(k).0;
            (k.id().to_string(), by_file.remove(file).expect("analyzed above"))
        })
        .collect())
}

/// One row per algorithm: numeric columns (code, ast, perf) followed by the
/// categorical conceptual columns. Column names carry their group prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmFeatureTable {
    algorithms: Vec<String>,
    numeric_names: Vec<String>,
    numeric: Vec<Vec<f64>>,
    categorical_names: Vec<String>,
    categorical: Vec<Vec<String>>,
}

impl AlgorithmFeatureTable {
    pub fn new(
        algorithms: Vec<String>,
        numeric_names: Vec<String>,
        numeric: Vec<Vec<f64>>,
        categorical_names: Vec<String>,
        categorical: Vec<Vec<String>>,
    ) -> Result<Self> {
        let n = algorithms.len();
        if numeric.len() != n || categorical.len() != n {
            return Err(Error::Schema("feature rows do not match the algorithm list".into()));
        }
        if numeric.iter().any(|r| r.len() != numeric_names.len())
            || categorical.iter().any(|r| r.len() != categorical_names.len())
        {
            return Err(Error::Schema("feature row width differs from the header".into()));
        }
        let unique: BTreeSet<&String> = algorithms.iter().collect();
        if unique.len() != n {
            return Err(Error::Schema("duplicate algorithm id in feature table".into()));
        }
        for name in numeric_names.iter().chain(&categorical_names) {
            match FeatureGroup::from_column(name) {
                None => return Err(Error::Schema(format!("column `{name}` has no known group prefix"))),
                Some(FeatureGroup::Conceptual) if numeric_names.contains(name) => {
                    return Err(Error::Schema(format!("conceptual column `{name}` must be categorical")))
                }
                Some(g) if g != FeatureGroup::Conceptual && categorical_names.contains(name) => {
                    return Err(Error::Schema(format!("column `{name}` must be numeric")))
                }
                _ => {}
            }
        }
        Ok(AlgorithmFeatureTable {
            algorithms,
            numeric_names,
            numeric,
            categorical_names,
            categorical,
        })
    }

    pub fn algorithms(&self) -> &[String] {
        &self.algorithms
    }

    pub fn index(&self, algorithm: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a == algorithm)
    }

    pub fn numeric_names(&self) -> &[String] {
        &self.numeric_names
    }

    pub fn categorical_names(&self) -> &[String] {
        &self.categorical_names
    }

    pub fn numeric_row(&self, algorithm: usize) -> &[f64] {
        &self.numeric[algorithm]
    }

    pub fn categorical_row(&self, algorithm: usize) -> &[String] {
        &self.categorical[algorithm]
    }

    /// All column names, numeric first.
    pub fn column_names(&self) -> Vec<String> {
        self.numeric_names.iter().chain(&self.categorical_names).cloned().collect()
    }

    pub fn group_of(column: &str) -> Option<FeatureGroup> {
        FeatureGroup::from_column(column)
    }

    /// Keeps only columns from `groups`, preserving order.
    pub fn select_groups(&self, groups: &[FeatureGroup]) -> AlgorithmFeatureTable {
        let keep = |name: &String| FeatureGroup::from_column(name).is_some_and(|g| groups.contains(&g));
        let num_idx: Vec<usize> = (0..self.numeric_names.len()).filter(|&i| keep(&self.numeric_names[i])).collect();
        let cat_idx: Vec<usize> = (0..self.categorical_names.len())
            .filter(|&i| keep(&self.categorical_names[i]))
            .collect();
        AlgorithmFeatureTable {
            algorithms: self.algorithms.clone(),
            numeric_names: num_idx.iter().map(|&i| self.numeric_names[i].clone()).collect(),
            numeric: self.numeric.iter().map(|r| num_idx.iter().map(|&i| r[i]).collect()).collect(),
            categorical_names: cat_idx.iter().map(|&i| self.categorical_names[i].clone()).collect(),
            categorical: self
                .categorical
                .iter()
                .map(|r| cat_idx.iter().map(|&i| r[i].clone()).collect())
                .collect(),
        }
    }

    pub fn drop_group(&self, group: FeatureGroup) -> AlgorithmFeatureTable {
        let rest: Vec<FeatureGroup> = FeatureGroup::ALL.into_iter().filter(|&g| g != group).collect();
        self.select_groups(&rest)
    }

    /// Width after one-hot encoding every categorical column over the values
    /// present in the table.
    pub fn encoded_width(&self) -> usize {
        let distinct: usize = (0..self.categorical_names.len())
            .map(|j| self.categorical.iter().map(|r| &r[j]).collect::<BTreeSet<_>>().len())
            .sum();
        self.numeric_names.len() + distinct
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file)
    }

    pub fn write_csv_to(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["algorithm_id".to_string()];
        header.extend(self.column_names());
        w.write_record(&header)?;
        for (a, id) in self.algorithms.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend(self.numeric[a].iter().map(|&v| fmt_f64(v)));
            rec.extend(self.categorical[a].iter().cloned());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<algorithm features>", e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv_from(file)
    }

    /// Reads a table written by [`write_csv_to`](Self::write_csv_to);
    /// `conceptual.*` columns are categorical, all others numeric.
    pub fn read_csv_from(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("algorithm_id") {
            return Err(Error::Schema("algorithm feature table must start with `algorithm_id`".into()));
        }
        let columns: Vec<(usize, String)> = header.iter().enumerate().skip(1).map(|(i, h)| (i, h.to_string())).collect();
        let is_cat = |name: &str| FeatureGroup::from_column(name) == Some(FeatureGroup::Conceptual);
        let numeric_names: Vec<String> = columns.iter().filter(|(_, n)| !is_cat(n)).map(|(_, n)| n.clone()).collect();
        let categorical_names: Vec<String> = columns.iter().filter(|(_, n)| is_cat(n)).map(|(_, n)| n.clone()).collect();
        let (mut algorithms, mut numeric, mut categorical) = (Vec::new(), Vec::new(), Vec::new());
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            algorithms.push(rec[0].to_string());
            let mut num = Vec::new();
            let mut cat = Vec::new();
            for (i, name) in &columns {
                if is_cat(name) {
                    cat.push(rec[*i].to_string());
                } else {
                    num.push(rec[*i].parse::<f64>().map_err(|e| Error::Parse {
                        row: row + 1,
                        msg: format!("column `{name}`: {e}"),
                    })?);
                }
            }
            numeric.push(num);
            categorical.push(cat);
        }
        Self::new(algorithms, numeric_names, numeric, categorical_names, categorical)
    }
}

/// Joins the four feature sources into one table with rows in `algorithms` order.
pub fn assemble_algorithm_features(
    algorithms: &[String],
    static_metrics: &BTreeMap<String, (CodeMetrics, AstGraphMetrics)>,
    landmarks: &Landmarks,
    tags: &BTreeMap<String, ConceptualTags>,
) -> Result<AlgorithmFeatureTable> {
    let prefixed = |g: FeatureGroup, n: &str| format!("{}.{n}", g.prefix());
    let mut numeric_names: Vec<String> = CodeMetrics::NAMES.iter().map(|n| prefixed(FeatureGroup::Code, n)).collect();
    numeric_names.extend(AstGraphMetrics::NAMES.iter().map(|n| prefixed(FeatureGroup::Ast, n)));
    numeric_names.extend(landmarks.feature_names().iter().map(|n| prefixed(FeatureGroup::Performance, n)));
    let categorical_names = conceptual::TAG_NAMES
        .iter()
        .map(|n| prefixed(FeatureGroup::Conceptual, n))
        .collect();

    let missing = |what: &str, id: &str| Error::config(format!("no {what} for algorithm `{id}`"));
    let mut numeric = Vec::with_capacity(algorithms.len());
    let mut categorical = Vec::with_capacity(algorithms.len());
    for id in algorithms {
        let (code, ast) = static_metrics.get(id).ok_or_else(|| missing("code metrics", id))?;
        let lm = landmarks
            .algorithms
            .iter()
            .position(|a| a == id)
            .ok_or_else(|| missing("landmarks", id))?;
        let mut row: Vec<f64> = code.values().to_vec();
        row.extend(ast.values());
        row.extend(landmarks.feature_row(lm));
        numeric.push(row);
        categorical.push(tags.get(id).ok_or_else(|| missing("conceptual tags", id))?.values().to_vec());
    }
    AlgorithmFeatureTable::new(algorithms.to_vec(), numeric_names, numeric, categorical_names, categorical)
}
