//! Run configuration: one TOML file naming inputs, settings and seeds.

use std::path::{Path, PathBuf};

use recsel::algo_features::conceptual::{load_conceptual_map, ConceptualTags, BUNDLED_MAP};
use recsel::algo_features::landmark::TimingMode;
use recsel::data::Feedback;
use recsel::experiment::{AblationConfig, CvConfig, HpoSpace, DEFAULT_STUDY_FOLDS};
use recsel::meta::Mode;
use recsel::recommenders::PortfolioConfig;
use recsel::synth::{PlantedConfig, ProbeManifest};
use recsel::util::{derive_seed, label_tag, sha256_hex};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub name: String,
    /// Standardized `user,item,rating,timestamp` file. When absent, the
    /// output of `ingest` is used.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub feedback: Feedback,
    /// Raw log read by `ingest`.
    #[serde(default)]
    pub raw: Option<PathBuf>,
    /// Ingestion settings for `raw`.
    #[serde(default)]
    pub ingest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_study_folds")]
    pub study_folds: usize,
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub hpo: HpoSpace,
    #[serde(default = "AblationConfig::standard_set")]
    pub ablation: Vec<AblationConfig>,
}

fn default_k() -> usize {
    10
}

fn default_study_folds() -> usize {
    DEFAULT_STUDY_FOLDS
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::UserOnly, Mode::UserAlgo]
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            k: default_k(),
            study_folds: default_study_folds(),
            modes: default_modes(),
            hpo: HpoSpace::default(),
            ablation: AblationConfig::standard_set(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub timing: TimingMode,
    pub dataset: DatasetSection,
    /// Portfolio, probe manifest and conceptual map; bundled defaults when absent.
    #[serde(default)]
    pub portfolio: Option<PathBuf>,
    #[serde(default)]
    pub probes: Option<PathBuf>,
    #[serde(default)]
    pub conceptual: Option<PathBuf>,
    #[serde(default)]
    pub synth: PlantedConfig,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

/// Sub-seeds handed to each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageSeeds {
    pub portfolio: u64,
    pub landmarks: u64,
    pub evaluation: u64,
    pub studies: u64,
}

impl RunConfig {
    /// Parses `path` and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.rebase(base);
        cfg.validate()?;
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out_dir);
        for p in [
            &mut self.dataset.path,
            &mut self.dataset.raw,
            &mut self.dataset.ingest,
            &mut self.portfolio,
            &mut self.probes,
            &mut self.conceptual,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.dataset.name.is_empty() || self.dataset.name.contains(['/', '\\']) {
            return Err(CliError::Config("dataset.name must be a plain non-empty name".into()));
        }
        for p in [&self.portfolio, &self.probes, &self.conceptual].into_iter().flatten() {
            require_file(p)?;
        }
        if self.experiment.modes.is_empty() {
            return Err(CliError::Config("experiment.modes lists no mode".into()));
        }
        self.experiment.hpo.validate()?;
        self.synth.validate()?;
        Ok(())
    }

    pub fn seeds(&self) -> StageSeeds {
        let s = |label| derive_seed(self.seed, &[label_tag(label)]);
        StageSeeds {
            portfolio: s("portfolio"),
            landmarks: s("landmarks"),
            evaluation: s("evaluation"),
            studies: s("studies"),
        }
    }

    /// Hash of every setting that can change an output. The output
    /// directory is left out so relocated reruns hash the same.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out_dir = PathBuf::new();
        sha256_hex(serde_json::to_string(&canonical).expect("config serializes").as_bytes())
    }

    pub fn portfolio(&self) -> Result<PortfolioConfig, CliError> {
        Ok(match &self.portfolio {
            Some(p) => PortfolioConfig::load(p)?,
            None => PortfolioConfig::default(),
        })
    }

    pub fn probe_manifest(&self) -> Result<ProbeManifest, CliError> {
        Ok(match &self.probes {
            Some(p) => ProbeManifest::load(p)?,
            None => ProbeManifest::default(),
        })
    }

    pub fn conceptual_map(&self, enabled: &[String]) -> Result<std::collections::BTreeMap<String, ConceptualTags>, CliError> {
        let text = match &self.conceptual {
            Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            None => BUNDLED_MAP.to_string(),
        };
        Ok(load_conceptual_map(&text, enabled)?)
    }

    /// The standardized dataset consumed by the ground-truth and feature stages.
    pub fn dataset_path(&self) -> PathBuf {
        self.dataset
            .path
            .clone()
            .unwrap_or_else(|| self.out_dir.join("ingest").join(format!("{}.csv", self.dataset.name)))
    }

    pub fn evaluation_cv(&self) -> CvConfig {
        CvConfig {
            k: self.experiment.k,
            seed: self.seeds().evaluation,
            hpo: self.experiment.hpo.clone(),
        }
    }

    pub fn study_cv(&self) -> CvConfig {
        CvConfig {
            k: self.experiment.study_folds,
            seed: self.seeds().studies,
            hpo: self.experiment.hpo.clone(),
        }
    }
}

pub fn require_file(p: &Path) -> Result<(), CliError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{} does not exist", p.display())))
    }
}
