//! Channel builders for the cookies and Topics pipelines.
//!
//! Row and column conventions:
//!
//! * `C_BH`, `C_U`: identity over users or histories.
//! * `C_G`: histories to top-sets, columns in first-occurrence order.
//! * `C_BN`, `C_DP`, report channel: top-sets to taxonomy topics.

use std::collections::HashMap;

use super::types::{dedup_first, ensure_in_taxonomy, TopSet, TopicAssignment, TopicsParams};
use crate::error::{Error, Result};
use crate::qif::{self, Channel, Label};

pub fn identity_channel(labels: Vec<Label>) -> Result<Channel> {
    Channel::identity(labels)
}

/// Deterministic channel sending each row label to its output label.
/// Columns follow first occurrence.
pub fn deterministic_channel(pairs: &[(Label, Label)]) -> Result<Channel> {
    let mut cols: Vec<Label> = Vec::new();
    let mut index: HashMap<&Label, usize> = HashMap::new();
    let mut targets = Vec::with_capacity(pairs.len());
    for (_, out) in pairs {
        let j = *index.entry(out).or_insert_with(|| {
            cols.push(out.clone());
            cols.len() - 1
        });
        targets.push(j);
    }
    let n = cols.len();
    let mut data = vec![0.0; pairs.len() * n];
    for (i, j) in targets.into_iter().enumerate() {
        data[i * n + j] = 1.0;
    }
    Channel::from_flat(pairs.iter().map(|(r, _)| r.clone()).collect(), cols, data)
}

/// `C_G`: histories to their top-sets.
pub fn generalization_channel(assignment: &TopicAssignment) -> Result<Channel> {
    let pairs: Vec<(Label, Label)> =
        assignment.histories().iter().cloned().zip(assignment.sets().iter().map(TopSet::label)).collect();
    deterministic_channel(&pairs)
}

/// Smallest number of rows mapped to any one column of a 0/1 channel.
pub fn k_anonymity_of(generalization: &Channel) -> Result<usize> {
    let mut counts = vec![0usize; generalization.n_cols()];
    for i in 0..generalization.n_rows() {
        for (j, &v) in generalization.row(i).iter().enumerate() {
            if v == 1.0 {
                counts[j] += 1;
            } else if v != 0.0 {
                return Err(Error::NotDeterministic(generalization.rows()[i].to_string()));
            }
        }
    }
    Ok(counts.into_iter().min().unwrap_or(0))
}

/// `C_BN`: a top-set reports one of its own topics uniformly.
pub fn bounded_noise_channel(topsets: &[TopSet], taxonomy: &[Label]) -> Result<Channel> {
    report_matrix(topsets, taxonomy, 0.0)
}

/// The noise bound `B`: nonzero entries per row, which must agree across rows.
pub fn noise_bound_of(channel: &Channel) -> Result<usize> {
    let mut bound = None;
    for i in 0..channel.n_rows() {
        let nz = channel.row(i).iter().filter(|&&v| v > 0.0).count();
        match bound {
            None => bound = Some(nz),
            Some(b) if b != nz => {
                return Err(Error::ParamMismatch(format!(
                    "row {} has {nz} nonzero entries, others have {b}",
                    channel.rows()[i]
                )))
            }
            _ => {}
        }
    }
    bound.ok_or(Error::EmptyLabelSet)
}

/// `C_DP`: every topic of the taxonomy with probability `1/m`.
pub fn dp_channel(topsets: &[TopSet], taxonomy: &[Label]) -> Result<Channel> {
    report_matrix(topsets, taxonomy, 1.0)
}

/// `C_BN (+)_r C_DP`: entry `(1-r)/s + r/m` for topics in the set, `r/m`
/// otherwise.
pub fn topics_report_channel(topsets: &[TopSet], params: &TopicsParams, taxonomy: &[Label]) -> Result<Channel> {
    if taxonomy.len() != params.m() {
        return Err(Error::ParamMismatch(format!("taxonomy has {} topics but m = {}", taxonomy.len(), params.m())));
    }
    if let Some(t) = topsets.iter().find(|t| t.len() != params.s()) {
        return Err(Error::ParamMismatch(format!("top-set {t} does not have s = {} topics", params.s())));
    }
    report_matrix(topsets, taxonomy, params.r())
}

fn report_matrix(topsets: &[TopSet], taxonomy: &[Label], r: f64) -> Result<Channel> {
    if taxonomy.is_empty() || topsets.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    let sets = dedup_first(topsets);
    for set in &sets {
        ensure_in_taxonomy(set, taxonomy)?;
    }
    let m = taxonomy.len();
    let out = r / m as f64;
    let mut data = Vec::with_capacity(sets.len() * m);
    for set in &sets {
        let inside = (1.0 - r) / set.len() as f64 + out;
        data.extend(taxonomy.iter().map(|t| if set.contains(t) { inside } else { out }));
    }
    Channel::from_flat(sets.iter().map(TopSet::label).collect(), taxonomy.to_vec(), data)
}

/// The pipeline stages for one assignment, rows indexed by history.
#[derive(Clone, Debug)]
pub struct TopicsChannels {
    /// `C_BH C_G`
    pub generalization: Channel,
    /// `C_BH C_G C_BN`
    pub bounded_noise: Channel,
    /// `C_T = C_BH C_G C_BN(+)rDP`, the privacy channel.
    pub complete: Channel,
    /// `C_BN(+)rDP`, the utility channel from top-sets.
    pub report: Channel,
}

impl TopicsChannels {
    pub fn build(assignment: &TopicAssignment, params: &TopicsParams) -> Result<Self> {
        let sets = assignment.distinct_sets();
        let taxonomy = assignment.taxonomy();
        let bh = identity_channel(assignment.histories().to_vec())?;
        let generalization = qif::cascade(&bh, &generalization_channel(assignment)?)?;
        let report = topics_report_channel(&sets, params, taxonomy)?;
        let bn = bounded_noise_channel(&sets, taxonomy)?;
        let bounded_noise = drop_empty_columns(&qif::cascade(&generalization, &bn)?)?;
        let complete = qif::cascade(&generalization, &report)?;
        Ok(TopicsChannels { generalization, bounded_noise, complete, report })
    }
}

/// Removes all-zero columns, e.g. topics that occur in no top-set.
pub fn drop_empty_columns(channel: &Channel) -> Result<Channel> {
    let keep: Vec<usize> =
        (0..channel.n_cols()).filter(|&j| (0..channel.n_rows()).any(|i| channel.get(i, j) > 0.0)).collect();
    let cols = keep.iter().map(|&j| channel.cols()[j].clone()).collect();
    let mut data = Vec::with_capacity(channel.n_rows() * keep.len());
    for i in 0..channel.n_rows() {
        data.extend(keep.iter().map(|&j| channel.get(i, j)));
    }
    Channel::from_flat(channel.rows().to_vec(), cols, data)
}
