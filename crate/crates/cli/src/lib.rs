//! Command-line front end for `cumcal`.
//!
//! Four subcommands: `cumulative` and `reliability` diagnose a CSV of
//! observations, `simulate` writes a synthetic dataset, and `figure-set`
//! regenerates the seven-panel comparison for a synthetic family.

use std::path::PathBuf;

use clap::builder::TypedValueParser as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cumcal::{BinningKind, DeviationFamily, DeviationParams, ScoreFamily};

mod commands;
mod output;

pub use commands::{cmd_cumulative, cmd_figure_set, cmd_reliability, cmd_simulate, run, Manifest, PanelEntry};
pub use output::Outputs;

pub const DEFAULT_FINE_BINS: usize = 20;
pub const DEFAULT_COARSE_BINS: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "cumcal", version, about = "Calibration diagnostics via cumulative differences and reliability diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plot cumulative differences between outcomes and scores.
    Cumulative(CumulativeArgs),
    /// Plot a binned reliability diagram with bootstrap replicates.
    Reliability(ReliabilityArgs),
    /// Write a synthetic dataset (score,outcome,true_prob).
    Simulate(SimulateArgs),
    /// Write the seven-panel figure set for a synthetic family.
    FigureSet(FigureSetArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CumulativeArgs {
    /// Input CSV with columns score,outcome.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory.
    #[arg(long = "out", default_value = ".")]
    pub out_dir: PathBuf,
    /// Seed for ordering tied scores.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    EqualWidth,
    EqualCount,
}

impl From<SchemeArg> for BinningKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::EqualWidth => BinningKind::EqualWidth,
            SchemeArg::EqualCount => BinningKind::EqualCount,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReliabilityArgs {
    /// Input CSV with columns score,outcome.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory.
    #[arg(long = "out", default_value = ".")]
    pub out_dir: PathBuf,
    /// Number of bins.
    #[arg(long, default_value_t = DEFAULT_FINE_BINS, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub bins: usize,
    /// Bin policy.
    #[arg(long, value_enum, default_value_t = SchemeArg::EqualWidth)]
    pub scheme: SchemeArg,
    /// Bootstrap replicates drawn as gray lines (0 disables).
    #[arg(long, default_value_t = cumcal::DEFAULT_REPLICATES)]
    pub bootstrap: usize,
    /// Seed for tie ordering and resampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Calibrated,
    Linear,
    BumpNotch,
    Oscillation,
}

impl From<FamilyArg> for DeviationFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Calibrated => DeviationFamily::Calibrated,
            FamilyArg::Linear => DeviationFamily::Linear,
            FamilyArg::BumpNotch => DeviationFamily::BumpNotch,
            FamilyArg::Oscillation => DeviationFamily::Oscillation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreFamilyArg {
    Equispaced,
    #[value(name = "dense-near-0")]
    DenseNear0,
    #[value(name = "dense-near-1")]
    DenseNear1,
}

impl From<ScoreFamilyArg> for ScoreFamily {
    fn from(f: ScoreFamilyArg) -> Self {
        match f {
            ScoreFamilyArg::Equispaced => ScoreFamily::Equispaced,
            ScoreFamilyArg::DenseNear0 => ScoreFamily::DenseNearZero,
            ScoreFamilyArg::DenseNear1 => ScoreFamily::DenseNearOne,
        }
    }
}

/// Synthetic model selection shared by `simulate` and `figure-set`.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Deviation of the true probabilities from the scores.
    #[arg(long, value_enum, default_value_t = FamilyArg::Calibrated)]
    pub family: FamilyArg,
    /// Distribution of the scores.
    #[arg(long, value_enum, default_value_t = ScoreFamilyArg::Equispaced)]
    pub score_family: ScoreFamilyArg,
    /// Number of observations.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub n: usize,
    /// Linear family: deviation at the extremes.
    #[arg(long, default_value_t = 0.1)]
    pub linear_slope: f64,
    /// Bump-notch family: peak height of the bump.
    #[arg(long, default_value_t = 0.1)]
    pub bump_height: f64,
    /// Bump-notch family: standard deviation of the bump.
    #[arg(long, default_value_t = 0.1)]
    pub bump_width: f64,
    /// Bump-notch family: score at the bump peak and notch center.
    #[arg(long, default_value_t = 0.25)]
    pub bump_center: f64,
    /// Bump-notch family: half-width of the calibrated notch.
    #[arg(long, default_value_t = 0.02)]
    pub notch_half_width: f64,
    /// Oscillation family: amplitude.
    #[arg(long, default_value_t = 0.06)]
    pub oscillation_amplitude: f64,
    /// Oscillation family: cycles per unit score.
    #[arg(long, default_value_t = 4.0)]
    pub oscillation_frequency: f64,
}

impl ModelArgs {
    pub fn params(&self) -> DeviationParams {
        DeviationParams {
            linear_slope: self.linear_slope,
            bump_height: self.bump_height,
            bump_width: self.bump_width,
            bump_center: self.bump_center,
            notch_half_width: self.notch_half_width,
            oscillation_amplitude: self.oscillation_amplitude,
            oscillation_frequency: self.oscillation_frequency,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let params = self.params();
        let values = [
            ("--linear-slope", params.linear_slope),
            ("--bump-height", params.bump_height),
            ("--bump-width", params.bump_width),
            ("--bump-center", params.bump_center),
            ("--notch-half-width", params.notch_half_width),
            ("--oscillation-amplitude", params.oscillation_amplitude),
            ("--oscillation-frequency", params.oscillation_frequency),
        ];
        for (flag, v) in values {
            anyhow::ensure!(v.is_finite(), "{flag} must be finite");
        }
        anyhow::ensure!(params.bump_width > 0.0, "--bump-width must be positive");
        anyhow::ensure!(params.notch_half_width >= 0.0, "--notch-half-width must be nonnegative");
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output directory; the dataset goes to `simulated.csv`.
    #[arg(long = "out", default_value = ".")]
    pub out_dir: PathBuf,
    /// Seed for the Bernoulli draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct FigureSetArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output directory.
    #[arg(long = "out", default_value = ".")]
    pub out_dir: PathBuf,
    /// Bin count of the finer reliability row.
    #[arg(long, default_value_t = DEFAULT_FINE_BINS, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub fine_bins: usize,
    /// Bin count of the coarser reliability row.
    #[arg(long, default_value_t = DEFAULT_COARSE_BINS, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub coarse_bins: usize,
    /// Bootstrap replicates per sampled reliability diagram (0 disables).
    #[arg(long, default_value_t = cumcal::DEFAULT_REPLICATES)]
    pub bootstrap: usize,
    /// Root seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
