//! Classical reliability diagrams.
//!
//! Samples are grouped into bins and each bin contributes the point
//! `(A_j, B_j)`: the mean score and the mean outcome of its members. Two
//! bin policies are supported. Equal-width bins split `[0, 1]` into `m`
//! intervals `[(j-1)/m, j/m)` (the last one closed) and drop the empty ones.
//! Equal-count bins split the sorted index range into `m` contiguous runs
//! whose sizes differ by at most one, the larger runs first.

use std::fmt;
use std::io::Write;
use std::ops::Range;
use std::str::FromStr;

use crate::data::SortedDataset;
use crate::numeric::{fmt_sig17, CompensatedSum};
use crate::synthetic::TrueModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinningKind {
    EqualWidth,
    EqualCount,
}

impl BinningKind {
    pub fn name(self) -> &'static str {
        match self {
            BinningKind::EqualWidth => "equal-width",
            BinningKind::EqualCount => "equal-count",
        }
    }
}

impl fmt::Display for BinningKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BinningKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-width" => Ok(BinningKind::EqualWidth),
            "equal-count" => Ok(BinningKind::EqualCount),
            other => Err(Error::InvalidBinning(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinningScheme {
    pub kind: BinningKind,
    pub bin_count: usize,
}

impl BinningScheme {
    pub fn new(kind: BinningKind, bin_count: usize) -> Self {
        Self { kind, bin_count }
    }

    pub fn equal_width(bin_count: usize) -> Self {
        Self::new(BinningKind::EqualWidth, bin_count)
    }

    pub fn equal_count(bin_count: usize) -> Self {
        Self::new(BinningKind::EqualCount, bin_count)
    }

    /// Checks the scheme against a dataset of `n` samples.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.bin_count == 0 {
            return Err(Error::InvalidBinning("bin count must be positive".into()));
        }
        if self.kind == BinningKind::EqualCount && self.bin_count > n {
            return Err(Error::InvalidBinning(format!(
                "{} equal-count bins requested for {n} samples",
                self.bin_count
            )));
        }
        Ok(())
    }
}

/// One point of a reliability diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinStats {
    /// 1-based bin number. For equal-width bins this is the interval number,
    /// so it can skip values when empty bins are dropped.
    pub bin: usize,
    /// Lower and upper score bounds: the interval for equal-width bins, the
    /// smallest and largest member score for equal-count bins.
    pub score_lo: f64,
    pub score_hi: f64,
    pub count: usize,
    /// `A_j`.
    pub mean_score: f64,
    /// `B_j`.
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityDiagram {
    pub bins: Vec<BinStats>,
    pub scheme: BinningScheme,
}

impl ReliabilityDiagram {
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.bins.iter().map(|b| (b.mean_score, b.success_rate))
    }

    /// Rows `bin,score_lo,score_hi,count,mean_score,success_rate`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bin,score_lo,score_hi,count,mean_score,success_rate")?;
        for b in &self.bins {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                b.bin,
                fmt_sig17(b.score_lo),
                fmt_sig17(b.score_hi),
                b.count,
                fmt_sig17(b.mean_score),
                fmt_sig17(b.success_rate)
            )?;
        }
        out.flush()
    }
}

/// A bin as a half-open range of 0-based sorted indices, with its number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinInterval {
    pub bin: usize,
    pub indices: Range<usize>,
}

/// Partitions the sorted dataset into bins.
pub fn assign_bins(dataset: &SortedDataset, scheme: BinningScheme) -> Result<Vec<BinInterval>> {
    let scores: Vec<f64> = dataset.scores().collect();
    assign_sorted_scores(&scores, scheme)
}

/// [`assign_bins`] for any non-decreasing score slice.
pub fn assign_sorted_scores(scores: &[f64], scheme: BinningScheme) -> Result<Vec<BinInterval>> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    scheme.validate(n)?;
    let m = scheme.bin_count;
    let bins = match scheme.kind {
        BinningKind::EqualCount => {
            let (base, extra) = (n / m, n % m);
            let mut start = 0;
            (0..m)
                .map(|j| {
                    let len = base + usize::from(j < extra);
                    let interval = BinInterval {
                        bin: j + 1,
                        indices: start..start + len,
                    };
                    start += len;
                    interval
                })
                .collect()
        }
        BinningKind::EqualWidth => {
            let slot = |p: f64| ((p * m as f64).floor() as usize).min(m - 1);
            let mut bins = Vec::new();
            let mut start = 0;
            while start < n {
                let j = slot(scores[start]);
                let len = scores[start..].partition_point(|&p| slot(p) == j);
                bins.push(BinInterval {
                    bin: j + 1,
                    indices: start..start + len,
                });
                start += len;
            }
            bins
        }
    };
    Ok(bins)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().copied().collect::<CompensatedSum>().value() / values.len() as f64
}

fn diagram_from(scores: &[f64], values: &[f64], scheme: BinningScheme) -> Result<ReliabilityDiagram> {
    let m = scheme.bin_count as f64;
    let bins = assign_sorted_scores(scores, scheme)?
        .into_iter()
        .map(|interval| {
            let members = &scores[interval.indices.clone()];
            let (score_lo, score_hi) = match scheme.kind {
                BinningKind::EqualWidth => ((interval.bin - 1) as f64 / m, interval.bin as f64 / m),
                BinningKind::EqualCount => (members[0], members[members.len() - 1]),
            };
            BinStats {
                bin: interval.bin,
                score_lo,
                score_hi,
                count: members.len(),
                mean_score: mean(members),
                success_rate: mean(&values[interval.indices]),
            }
        })
        .collect();
    Ok(ReliabilityDiagram { bins, scheme })
}

/// Per-bin mean score and mean outcome.
pub fn reliability_diagram(dataset: &SortedDataset, scheme: BinningScheme) -> Result<ReliabilityDiagram> {
    let scores: Vec<f64> = dataset.scores().collect();
    let outcomes: Vec<f64> = dataset.outcomes().collect();
    diagram_from(&scores, &outcomes, scheme)
}

/// The diagram's expectation: outcomes replaced by their true probabilities.
pub fn noiseless_diagram(model: &TrueModel, scheme: BinningScheme) -> Result<ReliabilityDiagram> {
    diagram_from(model.scores(), model.true_probs(), scheme)
}
