//! Observation types, CSV ingestion and the canonical score-sorted dataset.
//!
//! Input files are UTF-8 CSV with a `score,outcome` header (an optional third
//! column `true_prob` carries known success probabilities for synthetic
//! data). Lines starting with `#` are comments. The header row may be
//! omitted, in which case the first two columns are read as score and
//! outcome.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;

use crate::numeric::fmt_sig17;
use crate::{rng, Error, Result};

/// One (predicted probability, binary outcome) observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedSample {
    score: f64,
    outcome: bool,
}

impl PairedSample {
    /// Fails unless `0 <= score <= 1`. A negative zero is stored as `+0.0`.
    pub fn new(score: f64, outcome: bool) -> Result<Self> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::InvalidSample(format!(
                "score {score} is outside [0, 1]"
            )));
        }
        Ok(Self {
            score: score + 0.0,
            outcome,
        })
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn outcome(&self) -> bool {
        self.outcome
    }

    /// The outcome as `0.0` or `1.0`.
    pub fn outcome_value(&self) -> f64 {
        if self.outcome {
            1.0
        } else {
            0.0
        }
    }
}

/// Supported input encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    #[default]
    Csv,
}

/// Everything read from an input file.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub samples: Vec<PairedSample>,
    /// Present only when the file has a `true_prob` column.
    pub true_probs: Option<Vec<f64>>,
}

/// Reads all observations from `path`, in file order.
pub fn ingest(path: impl AsRef<Path>, format: InputFormat) -> Result<Vec<PairedSample>> {
    Ok(read_observations(path, format)?.samples)
}

/// Like [`ingest`], but also returns the optional `true_prob` column.
pub fn read_observations(path: impl AsRef<Path>, format: InputFormat) -> Result<Observations> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        InputFormat::Csv => Observations::from_csv(BufReader::new(file)),
    }
}

fn parse_unit(field: &str, line: u64, what: &str) -> Result<f64> {
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {what} `{field}`"),
    })?;
    Ok(value)
}

impl Observations {
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);

        let mut samples = Vec::new();
        let mut true_probs: Option<Vec<f64>> = None;
        let mut first = true;
        let mut record = csv::StringRecord::new();

        while rdr.read_record(&mut record)? {
            let line = record.position().map_or(0, |p| p.line());
            if record.iter().all(str::is_empty) {
                continue;
            }
            if first {
                first = false;
                if record.get(0) == Some("score") {
                    if record.get(1) != Some("outcome") {
                        return Err(Error::Parse {
                            line,
                            message: "expected header `score,outcome[,true_prob]`".into(),
                        });
                    }
                    match record.get(2) {
                        None => {}
                        Some("true_prob") => true_probs = Some(Vec::new()),
                        Some(other) => {
                            return Err(Error::Parse {
                                line,
                                message: format!("unexpected column `{other}`"),
                            })
                        }
                    }
                    continue;
                }
            }

            let expected = if true_probs.is_some() { 3 } else { 2 };
            if record.len() != expected {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {expected} fields, found {}", record.len()),
                });
            }

            let score_field = &record[0];
            let score = parse_unit(score_field, line, "score")?;
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::ScoreOutOfRange {
                    line,
                    value: score_field.to_string(),
                });
            }

            let outcome_field = &record[1];
            let outcome = match outcome_field.parse::<f64>() {
                Ok(0.0) => false,
                Ok(1.0) => true,
                _ => {
                    return Err(Error::InvalidOutcome {
                        line,
                        value: outcome_field.to_string(),
                    })
                }
            };

            if let Some(probs) = true_probs.as_mut() {
                let field = &record[2];
                let p = parse_unit(field, line, "true probability")?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::TrueProbOutOfRange {
                        line,
                        value: field.to_string(),
                    });
                }
                probs.push(p + 0.0);
            }
            samples.push(PairedSample::new(score, outcome)?);
        }

        if samples.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            samples,
            true_probs,
        })
    }
}

/// Writes samples in the ingest format, scores with 17 significant digits.
pub fn write_csv<W: Write>(
    mut out: W,
    samples: &[PairedSample],
    true_probs: Option<&[f64]>,
) -> std::io::Result<()> {
    if let Some(probs) = true_probs {
        assert_eq!(probs.len(), samples.len(), "one true probability per sample");
        writeln!(out, "score,outcome,true_prob")?;
        for (s, p) in samples.iter().zip(probs) {
            writeln!(
                out,
                "{},{},{}",
                fmt_sig17(s.score),
                u8::from(s.outcome),
                fmt_sig17(*p)
            )?;
        }
    } else {
        writeln!(out, "score,outcome")?;
        for s in samples {
            writeln!(out, "{},{}", fmt_sig17(s.score), u8::from(s.outcome))?;
        }
    }
    out.flush()
}

/// Index order sorting `scores` ascending, with each run of equal scores
/// placed in a uniformly random order drawn from `tie_seed`.
pub fn tie_randomized_order(scores: &[f64], tie_seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut rng = rng::stream(tie_seed);
    let mut start = 0;
    while start < order.len() {
        let score = scores[order[start]];
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == score {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].shuffle(&mut rng);
        }
        start = end;
    }
    order
}

/// Samples in non-decreasing score order; the input to every diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedDataset {
    samples: Vec<PairedSample>,
    tie_seed: u64,
}

impl SortedDataset {
    /// Sorts by score, ordering ties at random according to `tie_seed`.
    pub fn new(samples: Vec<PairedSample>, tie_seed: u64) -> Result<Self> {
        Ok(sort_with_tie_randomization(samples, tie_seed)?.0)
    }

    pub fn samples(&self) -> &[PairedSample] {
        &self.samples
    }

    pub fn tie_seed(&self) -> u64 {
        self.tie_seed
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scores(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.score)
    }

    pub fn outcomes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.samples.iter().map(PairedSample::outcome_value)
    }
}

/// Sorts `samples` by score with seeded random tie order.
///
/// Also returns the permutation applied: element `i` of the result is input
/// element `order[i]`. Callers use it to carry side columns along.
pub fn sort_with_tie_randomization(
    samples: Vec<PairedSample>,
    tie_seed: u64,
) -> Result<(SortedDataset, Vec<usize>)> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let scores: Vec<f64> = samples.iter().map(|s| s.score).collect();
    let order = tie_randomized_order(&scores, tie_seed);
    let sorted = order.iter().map(|&i| samples[i]).collect();
    Ok((
        SortedDataset {
            samples: sorted,
            tie_seed,
        },
        order,
    ))
}
