//! Calibration diagnostics for probabilistic binary predictions.
//!
//! The central object is the cumulative difference curve: after sorting
//! observations by predicted probability, the running mean of observed
//! outcomes minus the running mean of predictions, plotted against `k/n`.
//! Miscalibration over a contiguous range of scores shows up as the slope of
//! a secant over that range, and a triangle at the origin gives the scale of
//! purely random fluctuation. Classical binned reliability diagrams (with
//! bootstrap replicates) are provided alongside for comparison, together with
//! synthetic data families and SVG rendering.

pub mod binning;
pub mod bootstrap;
pub mod cumulative;
pub mod data;
mod error;
pub mod numeric;
pub mod render;
pub mod rng;
pub mod synthetic;

pub use binning::{BinStats, BinningKind, BinningScheme, ReliabilityDiagram};
pub use bootstrap::{BootstrapEnsemble, DEFAULT_REPLICATES};
pub use cumulative::{CumulativeCurve, SlopeEstimate};
pub use data::{InputFormat, Observations, PairedSample, SortedDataset};
pub use error::{Error, Result};
pub use render::{PlotKind, PlotSpec};
pub use synthetic::{DeviationFamily, DeviationParams, ScoreFamily, TrueModel};
