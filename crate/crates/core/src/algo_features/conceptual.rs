//! Hand-assigned conceptual tags per algorithm, loaded from a checked-in map
//! and validated against a closed vocabulary.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FAMILIES: [&str; 7] = [
    "Popularity",
    "Neighborhood",
    "Matrix Factorization",
    "Autoencoder",
    "Item Similarity",
    "Graph-based",
    "Sequential",
];

pub const PARADIGMS: [&str; 7] = [
    "Non-personalized",
    "Item-based",
    "User-based",
    "Pointwise",
    "Pairwise",
    "Closed-form",
    "Sequence-aware",
];

/// Column names of the conceptual group, in table order.
pub const TAG_NAMES: [&str; 3] = ["family", "learning_paradigm", "handles_cold_start"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptualTags {
    pub family: String,
    pub learning_paradigm: String,
    pub handles_cold_start: bool,
}

impl ConceptualTags {
    /// Tag values as category labels, in [`TAG_NAMES`] order.
    pub fn values(&self) -> [String; 3] {
        [
            self.family.clone(),
            self.learning_paradigm.clone(),
            self.handles_cold_start.to_string(),
        ]
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    version: u32,
    #[serde(rename = "algorithm")]
    algorithms: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    id: String,
    family: String,
    learning_paradigm: String,
    handles_cold_start: bool,
}

/// Parses the map and checks it covers every id in `enabled`.
pub fn load_conceptual_map(text: &str, enabled: &[String]) -> Result<BTreeMap<String, ConceptualTags>> {
    let file: MapFile = toml::from_str(text).map_err(|e| Error::config(format!("conceptual map: {e}")))?;
    if file.version != 1 {
        return Err(Error::config(format!("conceptual map: unsupported version {}", file.version)));
    }
    let mut map = BTreeMap::new();
    for Entry {
        id,
        family,
        learning_paradigm,
        handles_cold_start,
    } in file.algorithms
    {
        let tags = ConceptualTags {
            family,
            learning_paradigm,
            handles_cold_start,
        };
        if !FAMILIES.contains(&tags.family.as_str()) {
            return Err(Error::config(format!(
                "conceptual map: `{}` has unknown family `{}`",
                id, tags.family
            )));
        }
        if !PARADIGMS.contains(&tags.learning_paradigm.as_str()) {
            return Err(Error::config(format!(
                "conceptual map: `{}` has unknown learning paradigm `{}`",
                id, tags.learning_paradigm
            )));
        }
        if map.insert(id.clone(), tags).is_some() {
            return Err(Error::config(format!("conceptual map: `{}` listed twice", id)));
        }
    }
    let missing: BTreeSet<&str> = enabled
        .iter()
        .map(String::as_str)
        .filter(|id| !map.contains_key(*id))
        .collect();
    if !missing.is_empty() {
        return Err(Error::config(format!("conceptual map: no entry for {missing:?}")));
    }
    Ok(map)
}

pub fn load_conceptual_map_file(path: &Path, enabled: &[String]) -> Result<BTreeMap<String, ConceptualTags>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_conceptual_map(&text, enabled)
}

pub const BUNDLED_MAP: &str = include_str!("conceptual.toml");
