//! Performance landmarks: quality and cost of each portfolio algorithm on
//! small probe datasets kept apart from the evaluation data.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{filter_min_interactions, temporal_per_user_split, Dataset, SplitPair, DEFAULT_TEST_FRACTION, MIN_USER_INTERACTIONS};
use crate::error::{Error, Result};
use crate::ground_truth::evaluate_portfolio;
use crate::recommenders::{build_train_matrix, train, AlgorithmConfig, PortfolioConfig, TrainMatrix};
use crate::synth::{probe_dataset, ProbeSpec};
use crate::util::{derive_seed, fmt_f64, label_tag, median, rng};

/// Number of timed repetitions; the median is recorded.
pub const TIMING_RUNS: usize = 3;

/// Whether wall-clock times are measured. Disabled timing records zeros,
/// which keeps whole-pipeline outputs reproducible byte for byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingMode {
    #[default]
    WallClock,
    Disabled,
}

/// A probe dataset, split and ready for landmarking.
#[derive(Debug, Clone)]
pub struct Probe {
    pub name: String,
    pub split: SplitPair,
}

/// Keeps `round(fraction · users)` users (at least one), chosen by a seeded shuffle.
pub fn subsample_users(ds: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Precondition(format!("user fraction must lie in (0, 1], got {fraction}")));
    }
    let n = ds.users().len();
    let keep = ((fraction * n as f64).round() as usize).clamp(1, n.max(1));
    let mut ids: Vec<&str> = ds.users().ids().iter().map(String::as_str).collect();
    ids.shuffle(&mut rng(seed));
    let kept: std::collections::HashSet<&str> = ids.into_iter().take(keep).collect();
    Ok(ds.retain(|it| kept.contains(it.user.as_str())))
}

/// Generates, filters, optionally subsamples and splits one probe.
pub fn prepare_probe(spec: &ProbeSpec) -> Result<Probe> {
    let mut ds = filter_min_interactions(&probe_dataset(spec), MIN_USER_INTERACTIONS)?;
    if let Some(f) = spec.user_fraction {
        ds = subsample_users(&ds, f, derive_seed(spec.seed, &[label_tag("subsample")]))?;
    }
    Ok(Probe {
        name: spec.name.clone(),
        split: temporal_per_user_split(&ds, DEFAULT_TEST_FRACTION)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LandmarkRecord {
    /// Mean NDCG@10 over the probe's evaluated users.
    pub perf: f64,
    pub train_seconds: f64,
    /// Total time to rank and score every probe test user.
    pub predict_seconds: f64,
    /// The algorithm could not run on this probe; the values above are 0.
    pub failed: bool,
}

/// Landmarks for every (algorithm, probe) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Landmarks {
    pub algorithms: Vec<String>,
    pub probes: Vec<String>,
    /// Indexed `[algorithm][probe]`.
    pub records: Vec<Vec<LandmarkRecord>>,
}

impl Landmarks {
    /// Column names `perf_on_<p>`, `traintime_on_<p>`, `predtime_on_<p>` per probe.
    pub fn feature_names(&self) -> Vec<String> {
        self.probes
            .iter()
            .flat_map(|p| [format!("perf_on_{p}"), format!("traintime_on_{p}"), format!("predtime_on_{p}")])
            .collect()
    }

    pub fn feature_row(&self, algorithm: usize) -> Vec<f64> {
        self.records[algorithm]
            .iter()
            .flat_map(|r| [r.perf, r.train_seconds, r.predict_seconds])
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file)
    }

    /// Long layout with a failure flag per row.
    pub fn write_csv_to(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["algorithm", "probe", "perf", "train_seconds", "predict_seconds", "failed"])?;
        for (a, alg) in self.algorithms.iter().enumerate() {
            for (p, probe) in self.probes.iter().enumerate() {
                let r = &self.records[a][p];
                w.write_record([
                    alg.clone(),
                    probe.clone(),
                    fmt_f64(r.perf),
                    fmt_f64(r.train_seconds),
                    fmt_f64(r.predict_seconds),
                    u8::from(r.failed).to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io("<landmarks>", e))?;
        Ok(())
    }
}

fn measure(
    config: &AlgorithmConfig,
    probe: &Probe,
    m: &TrainMatrix,
    seed: u64,
    timing: TimingMode,
) -> Result<LandmarkRecord> {
    let runs = match timing {
        TimingMode::WallClock => TIMING_RUNS,
        TimingMode::Disabled => 1,
    };
    let mut perf = 0.0;
    let mut train_times = Vec::with_capacity(runs);
    let mut predict_times = Vec::with_capacity(runs);
    for _ in 0..runs {
        let start = Instant::now();
        let model = train(config, m, seed)?;
        train_times.push(start.elapsed().as_secs_f64());
        let start = Instant::now();
        let (pm, _) = evaluate_portfolio(&probe.split, m, std::slice::from_ref(&model))?;
        predict_times.push(start.elapsed().as_secs_f64());
        // deterministic, identical on every run
        perf = pm.column_means()[0];
    }
    Ok(match timing {
        TimingMode::WallClock => LandmarkRecord {
            perf,
            train_seconds: median(&train_times),
            predict_seconds: median(&predict_times),
            failed: false,
        },
        TimingMode::Disabled => LandmarkRecord {
            perf,
            ..Default::default()
        },
    })
}

/// Trains and evaluates every portfolio algorithm on every probe with the
/// same code path as ground-truth generation. Failures are recorded as a
/// zero row with the `failed` flag set.
pub fn landmark(portfolio: &PortfolioConfig, probes: &[Probe], seed: u64, timing: TimingMode) -> Result<Landmarks> {
    let matrices: Vec<TrainMatrix> = probes
        .iter()
        .map(|p| build_train_matrix(&p.split.train))
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..portfolio.algorithms.len())
        .flat_map(|a| (0..probes.len()).map(move |p| (a, p)))
        .collect();
    let records: Vec<LandmarkRecord> = pairs
        .par_iter()
        .map(|&(a, p)| {
            let config = &portfolio.algorithms[a];
            match measure(config, &probes[p], &matrices[p], seed, timing) {
                Ok(r) => r,
                Err(e) => {
                    log::warn!("landmark {} on {} failed: {e}", config.kind(), probes[p].name);
                    LandmarkRecord {
                        failed: true,
                        ..Default::default()
                    }
                }
            }
        })
        .collect();
    Ok(Landmarks {
        algorithms: portfolio.ids(),
        probes: probes.iter().map(|p| p.name.clone()).collect(),
        records: records.chunks(probes.len().max(1)).map(<[_]>::to_vec).collect(),
    })
}
