//! Synthetic experiment families.
//!
//! A [`TrueModel`] pairs predicted scores `P_k` with the actual success
//! probabilities used to draw outcomes. Score families are exact:
//!
//! * `equispaced`: `P_k = (k - 0.5)/n`
//! * `dense-near-0`: `P_k = ((k - 0.5)/n)^2`
//! * `dense-near-1`: `P_k = sqrt((k - 0.5)/n)`
//!
//! Deviation families are concrete parameterized forms; every result is
//! clipped to `[0, 1]`:
//!
//! * `calibrated`: truth equals the score
//! * `linear`: `P_k + s (2 (k - 0.5)/n - 1)`, odd about the middle index
//! * `bump-notch`: `P_k + h exp(-(P_k - c)^2 / (2 sigma^2))` except inside the
//!   notch `|P_k - c| < w`, where the truth equals the score exactly
//! * `oscillation`: `P_k + a sin(2 pi f P_k)`
//!
//! Bump-notch truth lies above the score (outcomes succeed more often than
//! predicted).

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::data::{PairedSample, SortedDataset};
use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreFamily {
    Equispaced,
    DenseNearZero,
    DenseNearOne,
}

impl ScoreFamily {
    pub const ALL: [ScoreFamily; 3] = [
        ScoreFamily::Equispaced,
        ScoreFamily::DenseNearZero,
        ScoreFamily::DenseNearOne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScoreFamily::Equispaced => "equispaced",
            ScoreFamily::DenseNearZero => "dense-near-0",
            ScoreFamily::DenseNearOne => "dense-near-1",
        }
    }
}

impl fmt::Display for ScoreFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScoreFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationFamily {
    Calibrated,
    Linear,
    BumpNotch,
    Oscillation,
}

impl DeviationFamily {
    pub const ALL: [DeviationFamily; 4] = [
        DeviationFamily::Calibrated,
        DeviationFamily::Linear,
        DeviationFamily::BumpNotch,
        DeviationFamily::Oscillation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DeviationFamily::Calibrated => "calibrated",
            DeviationFamily::Linear => "linear",
            DeviationFamily::BumpNotch => "bump-notch",
            DeviationFamily::Oscillation => "oscillation",
        }
    }
}

impl fmt::Display for DeviationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeviationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DeviationFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Parameters of the deviation families. Each family reads only its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationParams {
    /// `s` of the linear family.
    pub linear_slope: f64,
    /// `h` of the bump.
    pub bump_height: f64,
    /// `sigma` of the bump.
    pub bump_width: f64,
    /// `c`, where the bump peaks and the notch is centered.
    pub bump_center: f64,
    /// `w`, half-width of the calibrated notch.
    pub notch_half_width: f64,
    /// `a` of the oscillation.
    pub oscillation_amplitude: f64,
    /// `f` of the oscillation, in cycles per unit score.
    pub oscillation_frequency: f64,
}

impl Default for DeviationParams {
    fn default() -> Self {
        Self {
            linear_slope: 0.1,
            bump_height: 0.1,
            bump_width: 0.1,
            bump_center: 0.25,
            notch_half_width: 0.02,
            oscillation_amplitude: 0.06,
            oscillation_frequency: 4.0,
        }
    }
}

/// Scores `P_1 < ... < P_n` of the given family, all strictly inside (0, 1).
pub fn score_family(family: ScoreFamily, n: usize) -> Vec<f64> {
    let nf = n as f64;
    (1..=n)
        .map(|k| {
            let u = (k as f64 - 0.5) / nf;
            match family {
                ScoreFamily::Equispaced => u,
                ScoreFamily::DenseNearZero => u * u,
                ScoreFamily::DenseNearOne => u.sqrt(),
            }
        })
        .collect()
}

/// Whether `score` is inside the calibrated notch of the bump-notch family.
pub fn in_notch(score: f64, params: &DeviationParams) -> bool {
    (score - params.bump_center).abs() < params.notch_half_width
}

/// True success probabilities for `scores` (taken in index order).
pub fn deviation_family(family: DeviationFamily, scores: &[f64], params: &DeviationParams) -> Vec<f64> {
    let n = scores.len() as f64;
    scores
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let shifted = match family {
                DeviationFamily::Calibrated => p,
                DeviationFamily::Linear => {
                    let centered = 2.0 * (i as f64 + 0.5) / n - 1.0;
                    p + params.linear_slope * centered
                }
                DeviationFamily::BumpNotch => {
                    if in_notch(p, params) {
                        p
                    } else {
                        let z = (p - params.bump_center) / params.bump_width;
                        p + params.bump_height * (-0.5 * z * z).exp()
                    }
                }
                DeviationFamily::Oscillation => {
                    let phase = 2.0 * std::f64::consts::PI * params.oscillation_frequency * p;
                    p + params.oscillation_amplitude * phase.sin()
                }
            };
            shifted.clamp(0.0, 1.0)
        })
        .collect()
}

/// Predicted scores together with the probabilities outcomes are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueModel {
    scores: Vec<f64>,
    true_probs: Vec<f64>,
    family_name: String,
    parameters: DeviationParams,
}

impl TrueModel {
    /// Builds a model from a score family and a deviation family.
    pub fn new(
        scores: ScoreFamily,
        deviation: DeviationFamily,
        n: usize,
        parameters: DeviationParams,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("n must be positive".into()));
        }
        let score_values = score_family(scores, n);
        let true_probs = deviation_family(deviation, &score_values, &parameters);
        Ok(Self {
            scores: score_values,
            true_probs,
            family_name: format!("{deviation}/{scores}"),
            parameters,
        })
    }

    /// A model with explicit values. Scores must be non-decreasing and every
    /// value must lie in `[0, 1]`.
    pub fn from_parts(scores: Vec<f64>, true_probs: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::InvalidModel("n must be positive".into()));
        }
        if scores.len() != true_probs.len() {
            return Err(Error::InvalidModel(format!(
                "{} scores but {} true probabilities",
                scores.len(),
                true_probs.len()
            )));
        }
        let unit = |x: &f64| (0.0..=1.0).contains(x);
        if !scores.iter().all(unit) || !true_probs.iter().all(unit) {
            return Err(Error::InvalidModel("values must lie in [0, 1]".into()));
        }
        if scores.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidModel("scores must be sorted".into()));
        }
        Ok(Self {
            scores,
            true_probs,
            family_name: "custom".into(),
            parameters: DeviationParams::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.scores.len()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn true_probs(&self) -> &[f64] {
        &self.true_probs
    }

    /// `deviation/score-family`, or `custom`.
    pub fn family_name(&self) -> &str {
        &self.family_name
    }

    pub fn parameters(&self) -> &DeviationParams {
        &self.parameters
    }

    /// Per-step slopes `true_k - P_k`.
    pub fn deviations(&self) -> impl Iterator<Item = f64> + '_ {
        self.true_probs.iter().zip(&self.scores).map(|(t, p)| t - p)
    }

    /// Draws outcomes and returns the sorted dataset (tie order from `seed`).
    pub fn sample(&self, seed: u64) -> SortedDataset {
        let outcomes = draw_outcomes(self, seed);
        let samples = self
            .scores
            .iter()
            .zip(outcomes)
            .map(|(&p, c)| PairedSample::new(p, c).expect("model scores lie in [0, 1]"))
            .collect();
        SortedDataset::new(samples, seed).expect("models are non-empty")
    }
}

/// Independent Bernoulli outcomes with success probabilities `true_probs`.
///
/// Outcome `k` is a success iff the `k`-th 64-bit output `u` of the seeded
/// stream satisfies `u / 2^64 < true_k`.
pub fn draw_outcomes(model: &TrueModel, seed: u64) -> Vec<bool> {
    let mut stream = rng::stream(seed);
    model
        .true_probs
        .iter()
        .map(|&p| rng::bernoulli_from_u64(stream.next_u64(), p))
        .collect()
}
