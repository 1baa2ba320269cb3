//! Cumulative differences between observed outcomes and predicted
//! probabilities.
//!
//! For a score-sorted dataset with scores `P_1 <= ... <= P_n` and outcomes
//! `C_1, ..., C_n`, the curve is `D_k = E_k - F_k` where
//! `F_k = (1/n) sum_{j<=k} P_j` and `E_k = (1/n) sum_{j<=k} C_j`, plotted
//! against `k/n`. Each step moves the curve by `(C_k - P_k)/n`, whose
//! expectation is `(true_k - P_k)/n`; so the slope of a secant over an index
//! range estimates the average miscalibration over the matching scores,
//! while the constant offset carries no information.
//!
//! The curve starts at `D_0 = 0`. Under perfect calibration the standard
//! deviation of `D_n` is `sqrt(sum P_k (1 - P_k)) / n`, the triangle
//! half-height drawn at the origin as a scale bar.

use std::io::{BufRead, Write};

use crate::data::SortedDataset;
use crate::numeric::{fmt_sig17, CompensatedSum};
use crate::synthetic::TrueModel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCurve {
    abscissas: Vec<f64>,
    ordinates: Vec<f64>,
    scores: Vec<f64>,
    triangle_half_height: f64,
}

impl CumulativeCurve {
    /// Assembles a curve from its sorted scores and ordinates `D_1..D_n`.
    pub fn from_parts(scores: Vec<f64>, ordinates: Vec<f64>, triangle_half_height: f64) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::Empty);
        }
        if scores.len() != ordinates.len() {
            return Err(Error::InvalidSample(format!(
                "{} scores but {} ordinates",
                scores.len(),
                ordinates.len()
            )));
        }
        if triangle_half_height.is_nan() || triangle_half_height < 0.0 || ordinates.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidSample("non-finite curve values".into()));
        }
        let n = scores.len() as f64;
        let abscissas = (1..=scores.len()).map(|k| k as f64 / n).collect();
        Ok(Self {
            abscissas,
            ordinates,
            scores,
            triangle_half_height,
        })
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// `k/n` for `k = 1..=n`.
    pub fn abscissas(&self) -> &[f64] {
        &self.abscissas
    }

    /// `D_k` for `k = 1..=n`.
    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    /// Sorted scores `P_k`, used to label the lower axis.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn triangle_half_height(&self) -> f64 {
        self.triangle_half_height
    }

    /// `D_k` with the convention `D_0 = 0`.
    pub fn diff_at(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.ordinates[k - 1]
        }
    }

    /// Writes `k,k_over_n,score,diff` rows after a
    /// `# triangle_half_height=<h>` comment line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# triangle_half_height={}", fmt_sig17(self.triangle_half_height))?;
        writeln!(out, "k,k_over_n,score,diff")?;
        for (i, ((x, p), d)) in self
            .abscissas
            .iter()
            .zip(&self.scores)
            .zip(&self.ordinates)
            .enumerate()
        {
            writeln!(out, "{},{},{},{}", i + 1, fmt_sig17(*x), fmt_sig17(*p), fmt_sig17(*d))?;
        }
        out.flush()
    }

    /// Reads back the output of [`CumulativeCurve::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut height = None;
        let mut scores = Vec::new();
        let mut ordinates = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let lineno = i as u64 + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("triangle_half_height=") {
                    height = Some(parse_field(v, lineno)?);
                }
                continue;
            }
            if line.is_empty() || line.starts_with("k,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 4 fields, found {}", fields.len()),
                });
            }
            let k: usize = fields[0].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad index `{}`", fields[0]),
            })?;
            if k != scores.len() + 1 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected k = {}, found {k}", scores.len() + 1),
                });
            }
            scores.push(parse_field(fields[2], lineno)?);
            ordinates.push(parse_field(fields[3], lineno)?);
        }
        let height = height.ok_or(Error::Parse {
            line: 1,
            message: "missing `# triangle_half_height=` line".into(),
        })?;
        Self::from_parts(scores, ordinates, height)
    }
}

fn parse_field(field: &str, line: u64) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{field}`"),
    })
}

/// A secant over the half-open index range `(k_lo, k_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    pub index_range: (usize, usize),
    /// Scores at `k_lo` and `k_hi`; for `k_lo = 0` the first score stands in.
    pub score_range: (f64, f64),
    pub slope: f64,
}

/// `(F(p), E(p))`: the sums of scores and of outcomes over samples with
/// `score <= p`, each divided by `n`.
pub fn cumulative_at(dataset: &SortedDataset, p: f64) -> (f64, f64) {
    let samples = dataset.samples();
    let n = samples.len() as f64;
    let end = samples.partition_point(|s| s.score() <= p);
    let mut f = CompensatedSum::new();
    let mut successes = 0usize;
    for s in &samples[..end] {
        f.add(s.score());
        successes += usize::from(s.outcome());
    }
    (f.value() / n, successes as f64 / n)
}

/// Running means `F_k` and `E_k` for `k = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningMeans {
    pub expected: Vec<f64>,
    pub empirical: Vec<f64>,
}

/// Computes `F_k` and `E_k` in one pass.
pub fn running_means(dataset: &SortedDataset) -> RunningMeans {
    let n = dataset.len() as f64;
    let mut f = CompensatedSum::new();
    let mut successes = 0usize;
    let mut expected = Vec::with_capacity(dataset.len());
    let mut empirical = Vec::with_capacity(dataset.len());
    for s in dataset.samples() {
        f.add(s.score());
        successes += usize::from(s.outcome());
        expected.push(f.value() / n);
        empirical.push(successes as f64 / n);
    }
    RunningMeans {
        expected,
        empirical,
    }
}

/// `sqrt(sum P_k (1 - P_k)) / n`.
pub fn triangle_half_height(scores: impl IntoIterator<Item = f64>) -> f64 {
    let mut n = 0usize;
    let mut var = CompensatedSum::new();
    for p in scores {
        var.add(p * (1.0 - p));
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    var.value().max(0.0).sqrt() / n as f64
}

// Ordinates from per-step increments, accumulated with compensation.
fn accumulate(steps: impl Iterator<Item = f64>, n: usize) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    let n = n as f64;
    steps
        .map(|step| {
            acc.add(step);
            acc.value() / n
        })
        .collect()
}

/// The cumulative difference curve of a sorted dataset, in O(n).
pub fn cumulative_curve(dataset: &SortedDataset) -> CumulativeCurve {
    let scores: Vec<f64> = dataset.scores().collect();
    let ordinates = accumulate(
        dataset.samples().iter().map(|s| s.outcome_value() - s.score()),
        scores.len(),
    );
    let h = triangle_half_height(scores.iter().copied());
    CumulativeCurve::from_parts(scores, ordinates, h).expect("sorted datasets are non-empty")
}

/// Exact expectation of the curve when outcomes are drawn from the model's
/// true probabilities: `D_k = (1/n) sum_{j<=k} (true_j - P_j)`.
pub fn noiseless_curve(model: &TrueModel) -> CumulativeCurve {
    let scores = model.scores().to_vec();
    let ordinates = accumulate(
        model
            .true_probs()
            .iter()
            .zip(model.scores())
            .map(|(t, p)| t - p),
        scores.len(),
    );
    let h = triangle_half_height(scores.iter().copied());
    CumulativeCurve::from_parts(scores, ordinates, h).expect("models are non-empty")
}

/// Slope of the secant from `(k_lo/n, D_{k_lo})` to `(k_hi/n, D_{k_hi})`.
///
/// `k_lo` may be 0 (the origin). The result is the mean of the per-step
/// slopes `n (D_k - D_{k-1})` over `k_lo < k <= k_hi`.
pub fn secant_slope(curve: &CumulativeCurve, k_lo: usize, k_hi: usize) -> Result<SlopeEstimate> {
    let n = curve.len();
    if k_lo >= k_hi || k_hi > n {
        return Err(Error::InvalidRange {
            lo: k_lo,
            hi: k_hi,
            n,
        });
    }
    let rise = curve.diff_at(k_hi) - curve.diff_at(k_lo);
    let slope = rise * n as f64 / (k_hi - k_lo) as f64;
    let lo_score = curve.scores[k_lo.max(1) - 1];
    Ok(SlopeEstimate {
        index_range: (k_lo, k_hi),
        score_range: (lo_score, curve.scores[k_hi - 1]),
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::PairedSample;
    use crate::synthetic::{DeviationFamily, DeviationParams, ScoreFamily, TrueModel};

    fn dataset(scores: &[f64], outcomes: &[u8]) -> SortedDataset {
        let samples = scores
            .iter()
            .zip(outcomes)
            .map(|(&p, &c)| PairedSample::new(p, c == 1).unwrap())
            .collect();
        SortedDataset::new(samples, 0).unwrap()
    }

    #[test]
    fn cumulative_at_direct_sums() {
        let ds = dataset(&[0.2, 0.4, 0.6], &[0, 1, 1]);
        let (f, e) = cumulative_at(&ds, 0.5);
        assert!((f - 0.2).abs() < 1e-15);
        assert!((e - 1.0 / 3.0).abs() < 1e-15);

        let (f, e) = cumulative_at(&ds, 1.0);
        assert!((f - 0.4).abs() < 1e-15);
        assert!((e - 2.0 / 3.0).abs() < 1e-15);

        assert_eq!(cumulative_at(&ds, 0.1), (0.0, 0.0));
        assert_eq!(cumulative_at(&ds, -3.0), (0.0, 0.0));
        assert_eq!(cumulative_at(&ds, 7.0), cumulative_at(&ds, 1.0));
    }

    #[test]
    fn curve_small_example() {
        let ds = dataset(&[0.2, 0.4, 0.6], &[0, 1, 1]);
        let curve = cumulative_curve(&ds);
        let expected = [-0.0667, 0.1333, 0.2667];
        for (d, want) in curve.ordinates().iter().zip(expected) {
            assert!((d - want).abs() < 5e-5, "{d} vs {want}");
        }
        assert_eq!(curve.abscissas(), &[1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert_eq!(curve.scores(), &[0.2, 0.4, 0.6]);
    }

    #[test]
    fn triangle_height_examples() {
        let ds = dataset(&[0.5; 4], &[1, 0, 0, 1]);
        assert_eq!(cumulative_curve(&ds).triangle_half_height(), 0.25);

        let ds = dataset(&[0.0, 1.0], &[0, 1]);
        let curve = cumulative_curve(&ds);
        assert_eq!(curve.triangle_half_height(), 0.0);
        assert_eq!(curve.ordinates(), &[0.0, 0.0]);
    }

    #[test]
    fn single_step_slope() {
        let ds = dataset(&[0.2, 0.4], &[1, 1]);
        let curve = cumulative_curve(&ds);
        let est = secant_slope(&curve, 1, 2).unwrap();
        assert!((est.slope - 0.6).abs() < 1e-12);
        assert_eq!(est.score_range, (0.2, 0.4));
        assert_eq!(est.index_range, (1, 2));
    }

    #[test]
    fn full_range_slope_from_origin() {
        let ds = dataset(&[0.25, 0.75], &[0, 1]);
        let curve = cumulative_curve(&ds);
        let est = secant_slope(&curve, 0, 2).unwrap();
        assert_eq!(est.slope, 0.0);
        assert_eq!(est.score_range, (0.25, 0.75));
    }

    #[test]
    fn invalid_ranges() {
        let ds = dataset(&[0.2, 0.4, 0.6], &[0, 1, 1]);
        let curve = cumulative_curve(&ds);
        assert!(matches!(secant_slope(&curve, 2, 2), Err(Error::InvalidRange { .. })));
        assert!(matches!(secant_slope(&curve, 3, 1), Err(Error::InvalidRange { .. })));
        assert!(matches!(secant_slope(&curve, 1, 4), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn noiseless_null_is_zero() {
        let model = TrueModel::new(ScoreFamily::DenseNearZero, DeviationFamily::Calibrated, 500, DeviationParams::default()).unwrap();
        let curve = noiseless_curve(&model);
        assert!(curve.ordinates().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn noiseless_constant_shift_is_linear() {
        let scores: Vec<f64> = (1..=10).map(|k| 0.05 * k as f64).collect();
        let truth: Vec<f64> = scores.iter().map(|p| p + 0.1).collect();
        let model = TrueModel::from_parts(scores, truth).unwrap();
        let curve = noiseless_curve(&model);
        for (k, d) in curve.ordinates().iter().enumerate() {
            let want = 0.1 * (k + 1) as f64 / 10.0;
            assert!((d - want).abs() < 1e-15, "{d} vs {want}");
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = dataset(&[0.1, 0.2, 0.35, 0.9], &[1, 0, 1, 0]);
        let curve = cumulative_curve(&ds);
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# triangle_half_height="));
        assert!(text.lines().nth(1) == Some("k,k_over_n,score,diff"));
        let back = CumulativeCurve::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, curve);
    }

    #[test]
    fn read_csv_rejects_missing_height() {
        let err = CumulativeCurve::read_csv("k,k_over_n,score,diff\n1,1,0.5,0\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("triangle_half_height"));
    }
}
