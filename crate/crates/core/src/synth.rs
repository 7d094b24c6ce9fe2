//! Seeded synthetic interaction logs: a benchmark with two planted user
//! populations, and small probe datasets with distinct regimes.

use std::collections::BTreeSet;
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Feedback, Interaction};
use crate::error::{Error, Result};
use crate::util::{derive_seed, label_tag, rng};

/// Two user populations over a shared catalogue.
///
/// Mainstream users train on a long tail of niche items and move to popular
/// head items in their most recent interactions, so a popularity ranking wins
/// for them. Cluster users train on head items plus a private item cluster and
/// keep consuming that cluster, so item-neighborhood models win for them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedConfig {
    pub mainstream_users: usize,
    pub cluster_users: usize,
    pub head_items: usize,
    pub niche_items: usize,
    pub clusters: usize,
    pub cluster_size: usize,
    /// Niche items per mainstream user, before the head items.
    pub niche_per_user: usize,
    /// Head items each mainstream user moves to at the end of the history.
    pub late_head_per_user: usize,
    /// Head items in each cluster user's history.
    pub head_per_cluster_user: usize,
    /// Cluster items per cluster user.
    pub cluster_items_per_user: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            mainstream_users: 100,
            cluster_users: 100,
            head_items: 15,
            niche_items: 150,
            clusters: 10,
            cluster_size: 12,
            niche_per_user: 12,
            late_head_per_user: 3,
            head_per_cluster_user: 6,
            cluster_items_per_user: 10,
            seed: 20_240_601,
        }
    }
}

impl PlantedConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.mainstream_users + self.cluster_users > 0, "no users"),
            (self.head_items >= self.head_per_cluster_user + 1, "head_items too small"),
            (self.head_items >= self.late_head_per_user, "late_head_per_user exceeds head_items"),
            (self.niche_items >= self.niche_per_user, "niche_per_user exceeds niche_items"),
            (self.cluster_size >= self.cluster_items_per_user, "cluster_items_per_user exceeds cluster_size"),
            (self.clusters > 0 || self.cluster_users == 0, "cluster users need at least one cluster"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::config(format!("planted dataset: {msg}"))),
            None => Ok(()),
        }
    }
}

/// Rating drawn uniformly from 1..=5.
fn rating(rng: &mut impl Rng) -> f64 {
    f64::from(rng.gen_range(1..=5u8))
}

/// Zipf-like weights 1/(r+1)^exponent.
fn zipf_weights(n: usize, exponent: f64) -> Vec<f64> {
    (0..n).map(|r| 1.0 / ((r + 1) as f64).powf(exponent)).collect()
}

/// Draws `k` distinct indices following `weights`, in draw order.
fn sample_distinct(rng: &mut impl Rng, weights: &[f64], k: usize) -> Vec<usize> {
    let mut w = weights.to_vec();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.min(w.len()) {
        let dist = WeightedIndex::new(&w).expect("positive weights remain");
        let i = dist.sample(rng);
        out.push(i);
        w[i] = 0.0;
    }
    out
}

/// Appends one user's history with strictly increasing timestamps.
fn push_history(out: &mut Vec<Interaction>, rng: &mut impl Rng, user: &str, items: &[String], start: i64) {
    let mut ts = start;
    for item in items {
        ts += rng.gen_range(60..86_400);
        out.push(Interaction::new(user, item.clone(), rating(rng), ts));
    }
}

pub fn planted_dataset(cfg: &PlantedConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng(cfg.seed);
    let head = |i: usize| format!("h{i:03}");
    let head_weights = zipf_weights(cfg.head_items, 1.0);
    let mut rows = Vec::new();

    for u in 0..cfg.mainstream_users {
        let user = format!("m{u:03}");
        let niche = sample_distinct(&mut rng, &vec![1.0; cfg.niche_items], cfg.niche_per_user);
        let late = sample_distinct(&mut rng, &head_weights, cfg.late_head_per_user);
        let items: Vec<String> = niche
            .into_iter()
            .map(|i| format!("n{i:03}"))
            .chain(late.into_iter().map(head))
            .collect();
        let start = rng.gen_range(0..1_000_000);
        push_history(&mut rows, &mut rng, &user, &items, start);
    }

    for u in 0..cfg.cluster_users {
        let user = format!("c{u:03}");
        let cluster = u % cfg.clusters;
        let heads = sample_distinct(&mut rng, &head_weights, cfg.head_per_cluster_user);
        let mut members = sample_distinct(&mut rng, &vec![1.0; cfg.cluster_size], cfg.cluster_items_per_user);
        // Shuffle heads into the training part only; the tail stays in-cluster.
        let mut early: Vec<String> = heads.into_iter().map(head).collect();
        let tail_len = members.len() / 3;
        let tail = members.split_off(members.len() - tail_len);
        early.extend(members.into_iter().map(|i| format!("k{cluster:02}_{i:02}")));
        early.shuffle(&mut rng);
        early.extend(tail.into_iter().map(|i| format!("k{cluster:02}_{i:02}")));
        let start = rng.gen_range(0..1_000_000);
        push_history(&mut rows, &mut rng, &user, &early, start);
    }
    Ok(Dataset::new("planted", rows))
}

/// Structural regime of a probe dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeRegime {
    /// Item choice follows a steep Zipf law.
    PopularitySkewed,
    /// Users stay inside one of a few item clusters.
    NeighborhoodClustered,
    /// Uniform item choice over a large catalogue.
    UniformSparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub name: String,
    pub regime: ProbeRegime,
    pub users: usize,
    pub items: usize,
    pub interactions_per_user: usize,
    pub seed: u64,
    /// Fraction of users kept when landmarking; `None` keeps all.
    #[serde(default)]
    pub user_fraction: Option<f64>,
}

/// The probe manifest: probe datasets used only for landmarking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeManifest {
    #[serde(rename = "probe")]
    pub probes: Vec<ProbeSpec>,
}

impl Default for ProbeManifest {
    fn default() -> Self {
        let spec = |name: &str, regime, items, per_user, seed| ProbeSpec {
            name: name.into(),
            regime,
            users: 80,
            items,
            interactions_per_user: per_user,
            seed,
            user_fraction: None,
        };
        ProbeManifest {
            probes: vec![
                spec("probe_popular", ProbeRegime::PopularitySkewed, 120, 15, 101),
                spec("probe_clustered", ProbeRegime::NeighborhoodClustered, 120, 15, 202),
                spec("probe_sparse", ProbeRegime::UniformSparse, 400, 12, 303),
            ],
        }
    }
}

impl ProbeManifest {
    pub fn from_toml(text: &str) -> Result<Self> {
        let m: ProbeManifest = toml::from_str(text).map_err(|e| Error::config(format!("probe manifest: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probes.is_empty() {
            return Err(Error::config("probe manifest lists no probe"));
        }
        let names: BTreeSet<&str> = self.probes.iter().map(|p| p.name.as_str()).collect();
        if names.len() != self.probes.len() {
            return Err(Error::config("probe names must be unique"));
        }
        for p in &self.probes {
            if p.users == 0 || p.items < p.interactions_per_user || p.interactions_per_user < 2 {
                return Err(Error::config(format!(
                    "probe `{}` needs users > 0 and 2 <= interactions_per_user <= items",
                    p.name
                )));
            }
            if let Some(f) = p.user_fraction {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::config(format!("probe `{}`: user_fraction must lie in (0, 1]", p.name)));
                }
            }
        }
        Ok(())
    }
}

/// Generates a probe dataset. Ids are prefixed with the probe name so probes
/// never share users or items with evaluation data.
pub fn probe_dataset(spec: &ProbeSpec) -> Dataset {
    let mut rng = rng(derive_seed(spec.seed, &[label_tag(&spec.name)]));
    let n = spec.items;
    let k = spec.interactions_per_user;
    let skewed = zipf_weights(n, 1.2);
    let uniform = vec![1.0; n];
    let n_clusters = (n / (2 * k)).max(2);
    let mut rows = Vec::new();
    for u in 0..spec.users {
        let picks = match spec.regime {
            ProbeRegime::PopularitySkewed => sample_distinct(&mut rng, &skewed, k),
            ProbeRegime::UniformSparse => sample_distinct(&mut rng, &uniform, k),
            ProbeRegime::NeighborhoodClustered => {
                let c = u % n_clusters;
                // 90% of the mass on the user's own cluster
                let w: Vec<f64> = (0..n).map(|i| if i % n_clusters == c { 9.0 } else { 0.1 }).collect();
                sample_distinct(&mut rng, &w, k)
            }
        };
        let items: Vec<String> = picks.into_iter().map(|i| format!("{}:i{i:04}", spec.name)).collect();
        let start = rng.gen_range(0..1_000_000);
        push_history(&mut rows, &mut rng, &format!("{}:u{u:04}", spec.name), &items, start);
    }
    Dataset::new(spec.name.clone(), rows).with_feedback(Feedback::Explicit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{filter_min_interactions, temporal_per_user_split, MIN_USER_INTERACTIONS};

    #[test]
    fn planted_is_deterministic_and_sized() {
        let cfg = PlantedConfig::default();
        let a = planted_dataset(&cfg).unwrap();
        let b = planted_dataset(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.users().len(), 200);
        let kept = filter_min_interactions(&a, MIN_USER_INTERACTIONS).unwrap();
        assert_eq!(kept.users().len(), 200);
    }

    #[test]
    fn planted_test_parts_follow_the_populations() {
        let ds = planted_dataset(&PlantedConfig::default()).unwrap();
        let split = temporal_per_user_split(&ds, 0.2).unwrap();
        for it in split.test.interactions() {
            if it.user.starts_with('m') {
                assert!(it.item.starts_with('h'), "{it:?}");
            } else {
                assert!(it.item.starts_with('k'), "{it:?}");
            }
        }
        // cluster users never hold niche items and vice versa
        assert!(ds
            .interactions()
            .iter()
            .all(|it| !(it.user.starts_with('c') && it.item.starts_with('n'))));
    }

    #[test]
    fn planted_rejects_bad_config() {
        let cfg = PlantedConfig {
            cluster_items_per_user: 50,
            ..Default::default()
        };
        assert!(planted_dataset(&cfg).unwrap_err().is_config());
    }

    #[test]
    fn probes_have_requested_shape() {
        for spec in ProbeManifest::default().probes {
            let ds = probe_dataset(&spec);
            assert_eq!(ds.users().len(), spec.users);
            assert_eq!(ds.len(), spec.users * spec.interactions_per_user);
            assert!(ds.interactions().iter().all(|it| it.item.starts_with(&spec.name)));
            assert_eq!(ds, probe_dataset(&spec));
        }
    }

    #[test]
    fn skewed_probe_is_more_concentrated_than_uniform() {
        let m = ProbeManifest::default();
        let top_share = |ds: &Dataset| {
            let mut counts = std::collections::HashMap::new();
            for it in ds.interactions() {
                *counts.entry(it.item.clone()).or_insert(0usize) += 1;
            }
            let mut c: Vec<usize> = counts.into_values().collect();
            c.sort_unstable_by(|a, b| b.cmp(a));
            c.iter().take(10).sum::<usize>() as f64 / ds.len() as f64
        };
        let skewed = top_share(&probe_dataset(&m.probes[0]));
        let sparse = top_share(&probe_dataset(&m.probes[2]));
        assert!(skewed > 2.0 * sparse, "{skewed} vs {sparse}");
    }

    #[test]
    fn manifest_rejects_duplicates_and_bad_fraction() {
        let text = r#"
[[probe]]
name = "a"
regime = "uniform_sparse"
users = 5
items = 20
interactions_per_user = 4
seed = 1
user_fraction = 1.5
"#;
        assert!(ProbeManifest::from_toml(text).unwrap_err().is_config());
        let dup = format!("{0}{0}", text.replace("user_fraction = 1.5\n", ""));
        assert!(ProbeManifest::from_toml(&dup).unwrap_err().is_config());
    }
}
