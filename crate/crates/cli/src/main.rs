use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use recsel::meta::Mode;

mod commands;
mod config;
mod manifest;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] recsel::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_config() => 2,
            CliError::Core(_) => 1,
        }
    }
}

/// Per-user recommender algorithm selection pipeline.
#[derive(Debug, Parser)]
#[command(name = "recsel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restricts evaluation to one architecture: user_only or user_algo.
    #[arg(long)]
    mode: Option<Mode>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean a raw interaction log into the standardized format.
    Ingest(Common),
    /// Write the planted synthetic dataset and the probe datasets.
    Synth(Common),
    /// Train the portfolio and build the user × algorithm NDCG@10 matrix.
    GroundTruth(Common),
    /// Compute user features and algorithm features.
    Features(Common),
    /// Nested cross-validation of the baselines and meta-learners.
    Evaluate(Common),
    /// Algorithm-feature group ablation.
    Ablate(Common),
    /// Cross-fold feature importance of the user+algo meta-learner.
    Importance(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Ingest(c)
            | Command::Synth(c)
            | Command::GroundTruth(c)
            | Command::Features(c)
            | Command::Evaluate(c)
            | Command::Ablate(c)
            | Command::Importance(c) => c,
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(mode) = common.mode {
        cfg.experiment.modes = vec![mode];
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.command.common())?;
    match cli.command {
        Command::Ingest(_) => commands::ingest(&cfg),
        Command::Synth(_) => commands::synth(&cfg),
        Command::GroundTruth(_) => commands::ground_truth(&cfg),
        Command::Features(_) => commands::features(&cfg),
        Command::Evaluate(_) => commands::evaluate(&cfg),
        Command::Ablate(_) => commands::ablate(&cfg),
        Command::Importance(_) => commands::importance(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
