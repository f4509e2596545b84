//! Topic reporting and Monte Carlo channel estimation.

use rayon::prelude::*;
use serde::Serialize;

use super::rng::SimRng;
use crate::error::{Error, Result};
use crate::qif::{Channel, Label};
use crate::topics::{RandomizedResponse, TopSet};

/// One report: a uniform topic of `top_s`, replaced with probability `r` by
/// a uniform topic of the taxonomy. Returns the index into `taxonomy`.
///
/// Both sequences are indexed in the order given; pass them sorted for
/// results that do not depend on input order.
pub fn sample_reported_index(top_s: &[usize], taxonomy_len: usize, r: f64, rng: &mut SimRng) -> Result<usize> {
    if top_s.is_empty() {
        return Err(Error::EmptyTopSet);
    }
    let mut pick = top_s[rng.uniform_index(top_s.len())];
    if rng.bernoulli(r) {
        pick = rng.uniform_index(taxonomy_len);
    }
    Ok(pick)
}

pub fn sample_reported_topic(top_s: &TopSet, taxonomy: &[Label], r: f64, rng: &mut SimRng) -> Result<Label> {
    let idx: Vec<usize> = top_s
        .topics()
        .iter()
        .map(|t| taxonomy.iter().position(|x| x == t).ok_or_else(|| Error::TopicNotInTaxonomy(t.to_string())))
        .collect::<Result<_>>()?;
    sample_reported_index(&idx, taxonomy.len(), r, rng).map(|i| taxonomy[i].clone())
}

/// An estimated channel with the binomial standard error of each entry.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub channel: Channel,
    pub stderr: Vec<Vec<f64>>,
    pub trials_per_row: u64,
}

impl Estimate {
    /// Largest `|estimate - expected|` in units of the expected entry's
    /// standard error; entries with zero expected variance must match
    /// exactly.
    pub fn max_sigma_from(&self, expected: &Channel) -> Option<f64> {
        if expected.rows() != self.channel.rows() || expected.cols() != self.channel.cols() {
            return None;
        }
        let n = self.trials_per_row as f64;
        let mut worst: f64 = 0.0;
        for i in 0..expected.n_rows() {
            for j in 0..expected.n_cols() {
                let p = expected.get(i, j);
                let diff = (self.channel.get(i, j) - p).abs();
                let sd = (p * (1.0 - p) / n).sqrt();
                worst = worst.max(if sd > 0.0 {
                    diff / sd
                } else if diff > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                });
            }
        }
        Some(worst)
    }
}

/// Runs `sampler(row, rng)` `trials_per_row` times for each row and returns
/// the empirical frequencies. Row `i` uses sub-stream `i` of `seed`, so the
/// result does not depend on thread scheduling.
pub fn estimate_channel<F>(
    sampler: F,
    rows: Vec<Label>,
    cols: Vec<Label>,
    trials_per_row: u64,
    seed: u64,
) -> Result<Estimate>
where
    F: Fn(usize, &mut SimRng) -> Result<usize> + Sync,
{
    if trials_per_row == 0 {
        return Err(Error::BadParams("trials_per_row must be at least 1".into()));
    }
    let n_cols = cols.len();
    let counts: Vec<Vec<u64>> = (0..rows.len())
        .into_par_iter()
        .map(|i| {
            let mut rng = SimRng::substream(seed, i as u64);
            let mut row = vec![0u64; n_cols];
            for _ in 0..trials_per_row {
                let j = sampler(i, &mut rng)?;
                if j >= n_cols {
                    return Err(Error::DimensionMismatch(format!("sampler returned column {j} of {n_cols}")));
                }
                row[j] += 1;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let n = trials_per_row as f64;
    let entries: Vec<Vec<f64>> = counts.iter().map(|r| r.iter().map(|&c| c as f64 / n).collect()).collect();
    let stderr = entries.iter().map(|r| r.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect()).collect();
    Ok(Estimate { channel: Channel::new(rows, cols, entries)?, stderr, trials_per_row })
}

/// Estimates the report channel for `topsets` over `taxonomy`.
pub fn estimate_report_channel(
    topsets: &[TopSet],
    taxonomy: &[Label],
    r: f64,
    trials_per_row: u64,
    seed: u64,
) -> Result<Estimate> {
    let index: Vec<Vec<usize>> = topsets
        .iter()
        .map(|s| {
            s.topics()
                .iter()
                .map(|t| taxonomy.iter().position(|x| x == t).ok_or_else(|| Error::TopicNotInTaxonomy(t.to_string())))
                .collect()
        })
        .collect::<Result<_>>()?;
    let m = taxonomy.len();
    estimate_channel(
        |i, rng| sample_reported_index(&index[i], m, r, rng),
        topsets.iter().map(TopSet::label).collect(),
        taxonomy.to_vec(),
        trials_per_row,
        seed,
    )
}

/// Estimates the two-point counting channel.
pub fn estimate_counting_channel(rr: RandomizedResponse, trials_per_row: u64, seed: u64) -> Result<Estimate> {
    let labels = Label::seq(&["in", "out"])?;
    estimate_channel(
        |i, rng| {
            let p = if i == 0 { rr.p } else { rr.q };
            Ok(if rng.bernoulli(p) { 0 } else { 1 })
        },
        labels.clone(),
        labels,
        trials_per_row,
        seed,
    )
}

/// Monte Carlo result in the shape written to report files.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub seed: u64,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub partitions: usize,
}
