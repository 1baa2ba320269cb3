//! Bootstrap replicates of reliability diagrams.
//!
//! Each replicate resamples `n` pairs uniformly with replacement, re-sorts
//! them (resampling duplicates scores, so ties are re-randomized) and bins
//! them under the same scheme as the original. Replicate `r` draws from the
//! stream seeded with `rng::derive_seed(seed, r)`: first the `n` indices,
//! then one 64-bit tie seed.

use std::io::Write;

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::binning::{reliability_diagram, BinningScheme, ReliabilityDiagram};
use crate::data::SortedDataset;
use crate::numeric::fmt_sig17;
use crate::{rng, Error, Result};

/// Replicate count used by the plots unless overridden.
pub const DEFAULT_REPLICATES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapEnsemble {
    pub replicates: Vec<ReliabilityDiagram>,
    pub seed: u64,
    pub base_scheme: BinningScheme,
}

impl BootstrapEnsemble {
    /// Rows `replicate,bin,mean_score,success_rate`, replicates numbered from 1.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "replicate,bin,mean_score,success_rate")?;
        for (r, diagram) in self.replicates.iter().enumerate() {
            for b in &diagram.bins {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r + 1,
                    b.bin,
                    fmt_sig17(b.mean_score),
                    fmt_sig17(b.success_rate)
                )?;
            }
        }
        out.flush()
    }
}

/// The resampled dataset of replicate `replicate`.
pub fn resample(dataset: &SortedDataset, seed: u64, replicate: u64) -> SortedDataset {
    let mut stream = rng::stream(rng::derive_seed(seed, replicate));
    let samples = dataset.samples();
    let n = samples.len();
    let drawn = (0..n).map(|_| samples[stream.gen_range(0..n)]).collect();
    let tie_seed = stream.next_u64();
    SortedDataset::new(drawn, tie_seed).expect("resample of a non-empty dataset")
}

/// Builds `replicate_count` bootstrap diagrams. Replicates are computed in
/// parallel and returned in replicate order.
pub fn bootstrap_diagrams(
    dataset: &SortedDataset,
    scheme: BinningScheme,
    replicate_count: usize,
    seed: u64,
) -> Result<BootstrapEnsemble> {
    if replicate_count == 0 {
        return Err(Error::InvalidBinning("replicate count must be positive".into()));
    }
    scheme.validate(dataset.len())?;
    let replicates = (0..replicate_count as u64)
        .into_par_iter()
        .map(|r| reliability_diagram(&resample(dataset, seed, r), scheme))
        .collect::<Result<Vec<_>>>()?;
    Ok(BootstrapEnsemble {
        replicates,
        seed,
        base_scheme: scheme,
    })
}
