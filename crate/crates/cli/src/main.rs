//! Command-line front end for the experiment harness.
//!
//! Each subcommand runs one experiment from a key=value config file and
//! writes trials.csv, summary.csv, and per-series plot data into the output
//! directory. The summary table is echoed to stdout.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use cpe_core::harness::{self, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "cpe", about = "Parametric-dictionary estimation experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clustering resolution versus scene separation.
    Separation(RunArgs),
    /// Minimal resolvable separation along a decay, range, or threshold axis.
    Decay(RunArgs),
    /// Estimator accuracy versus compression rate.
    Compression(RunArgs),
    /// Estimator accuracy versus measurement SNR.
    Snr(RunArgs),
    /// Every configured algorithm once, at one fixed setting.
    Single(RunArgs),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &RunArgs) {
        match self {
            Command::Separation(a) => (ExperimentKind::SeparationSweep, a),
            Command::Decay(a) => (ExperimentKind::DecaySweep, a),
            Command::Compression(a) => (ExperimentKind::CompressionSweep, a),
            Command::Snr(a) => (ExperimentKind::SnrSweep, a),
            Command::Single(a) => (ExperimentKind::Single, a),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Config file: key = value lines under [section] headers.
    #[arg(long)]
    config: PathBuf,
    /// Directory for trials.csv, summary.csv, and plot-data files.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's trials per axis point.
    #[arg(long)]
    trials: Option<usize>,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if cfg.experiment != kind {
        bail!(
            "config names experiment '{}' but the '{}' subcommand was invoked",
            cfg.experiment.name(),
            kind.name()
        );
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    let outcome = harness::run(&cfg)?;
    let written = harness::write_experiment_outputs(&cfg, &outcome, &args.out)?;
    print!("{}", outcome.summary.csv_string()?);
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
