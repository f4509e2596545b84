use super::label::{ensure_unique, Label};
use super::TOLERANCE;
use crate::error::{Error, Result};

/// Probability distribution over labeled secrets.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior {
    labels: Vec<Label>,
    probs: Vec<f64>,
}

impl Prior {
    /// Validates a distribution. The sum must be within [`TOLERANCE`] of 1;
    /// the stored probabilities are renormalized to sum to 1.
    pub fn new(labels: Vec<Label>, probs: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLabelSet);
        }
        if labels.len() != probs.len() {
            return Err(Error::DimensionMismatch(format!("{} labels but {} probabilities", labels.len(), probs.len())));
        }
        ensure_unique(&labels)?;
        for (label, &p) in labels.iter().zip(&probs) {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::BadProbability(format!("{label}: {p}")));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > TOLERANCE {
            return Err(Error::BadProbability(format!("prior sums to {sum}")));
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Prior { labels, probs })
    }

    pub fn uniform(labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLabelSet);
        }
        ensure_unique(&labels)?;
        let p = 1.0 / labels.len() as f64;
        let probs = vec![p; labels.len()];
        Ok(Prior { labels, probs })
    }

    /// All mass on `labels[index]`.
    pub fn point(labels: Vec<Label>, index: usize) -> Result<Self> {
        if index >= labels.len() {
            return Err(Error::DimensionMismatch(format!("point index {index} out of {} labels", labels.len())));
        }
        let mut probs = vec![0.0; labels.len()];
        probs[index] = 1.0;
        Prior::new(labels, probs)
    }

    /// Prior proportional to non-negative weights (e.g. observed counts).
    pub fn from_weights(labels: Vec<Label>, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::BadProbability("weights must be non-negative with positive sum".into()));
        }
        Prior::new(labels, weights.iter().map(|w| w / total).collect())
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// The uniform distribution over `labels`.
pub fn uniform_prior(labels: Vec<Label>) -> Result<Prior> {
    Prior::uniform(labels)
}
