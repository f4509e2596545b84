use super::label::{ensure_unique, Label};
use super::prior::Prior;
use super::{ensure_same_labels, ensure_within_cap, TOLERANCE};
use crate::error::{Error, Result};

/// Row-stochastic matrix from labeled secrets to labeled observables.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    rows: Vec<Label>,
    cols: Vec<Label>,
    data: Vec<f64>,
}

impl Channel {
    /// Validates and builds a channel from nested rows.
    ///
    /// Rows whose sum lies within [`TOLERANCE`] of 1 are renormalized; any
    /// larger deviation is a [`Error::NonStochasticRow`].
    pub fn new(rows: Vec<Label>, cols: Vec<Label>, entries: Vec<Vec<f64>>) -> Result<Self> {
        if entries.len() != rows.len() {
            return Err(Error::DimensionMismatch(format!("{} row labels but {} rows", rows.len(), entries.len())));
        }
        ensure_within_cap(rows.len(), cols.len())?;
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for (label, row) in rows.iter().zip(&entries) {
            if row.len() != cols.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row {label} has {} entries, expected {}",
                    row.len(),
                    cols.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Channel::from_flat(rows, cols, data)
    }

    /// Same as [`Channel::new`] with a row-major flat buffer.
    pub fn from_flat(rows: Vec<Label>, cols: Vec<Label>, mut data: Vec<f64>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::EmptyLabelSet);
        }
        ensure_within_cap(rows.len(), cols.len())?;
        if data.len() != rows.len() * cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} channel",
                data.len(),
                rows.len(),
                cols.len()
            )));
        }
        ensure_unique(&rows)?;
        ensure_unique(&cols)?;
        let n = cols.len();
        for (i, row) in data.chunks_mut(n).enumerate() {
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NegativeEntry { row: rows[i].to_string(), col: cols[j].to_string(), value: v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > TOLERANCE {
                return Err(Error::NonStochasticRow { row: rows[i].to_string(), sum });
            }
            if sum != 1.0 {
                row.iter_mut().for_each(|v| *v /= sum);
            }
        }
        Ok(Channel { rows, cols, data })
    }

    /// Square identity channel: every secret is revealed.
    pub fn identity(labels: Vec<Label>) -> Result<Self> {
        let n = labels.len();
        ensure_within_cap(n, n)?;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Channel::from_flat(labels.clone(), labels, data)
    }

    pub fn rows(&self) -> &[Label] {
        &self.rows
    }

    pub fn cols(&self) -> &[Label] {
        &self.cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.cols.len();
        &self.data[row * n..(row + 1) * n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.len()).map(<[f64]>::to_vec).collect()
    }

    pub fn row_index(&self, label: &Label) -> Option<usize> {
        self.rows.iter().position(|l| l == label)
    }

    pub fn col_index(&self, label: &Label) -> Option<usize> {
        self.cols.iter().position(|l| l == label)
    }

    /// True when every entry is 0 or 1.
    pub fn is_deterministic(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Largest absolute entrywise difference; `None` when labels differ.
    pub fn max_abs_diff(&self, other: &Channel) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Copy of the channel with its columns relabeled and reordered so that
    /// they follow `order`; columns absent from `self` are filled with zeros.
    pub fn with_columns(&self, order: &[Label]) -> Result<Channel> {
        ensure_within_cap(self.n_rows(), order.len())?;
        for col in &self.cols {
            if !order.contains(col) {
                return Err(Error::LabelMismatch(format!("column {col} missing from new order")));
            }
        }
        let idx: Vec<Option<usize>> = order.iter().map(|l| self.col_index(l)).collect();
        let mut data = Vec::with_capacity(self.n_rows() * order.len());
        for i in 0..self.n_rows() {
            let row = self.row(i);
            data.extend(idx.iter().map(|j| j.map_or(0.0, |j| row[j])));
        }
        Channel::from_flat(self.rows.clone(), order.to_vec(), data)
    }
}

/// Joint distribution `J[x,y] = prior[x] * C[x,y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointMatrix {
    rows: Vec<Label>,
    cols: Vec<Label>,
    data: Vec<f64>,
}

impl JointMatrix {
    pub fn new(prior: &Prior, channel: &Channel) -> Result<Self> {
        ensure_same_labels(prior.labels(), channel.rows(), "prior labels differ from channel rows")?;
        let n = channel.n_cols();
        let mut data = channel.data().to_vec();
        for (row, &p) in data.chunks_mut(n).zip(prior.probs()) {
            row.iter_mut().for_each(|v| *v *= p);
        }
        Ok(JointMatrix { rows: channel.rows().to_vec(), cols: channel.cols().to_vec(), data })
    }

    pub fn rows(&self) -> &[Label] {
        &self.rows
    }

    pub fn cols(&self) -> &[Label] {
        &self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols.len() + col]
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Marginal probability of each output.
    pub fn output_marginal(&self) -> Vec<f64> {
        let n = self.cols.len();
        let mut out = vec![0.0; n];
        for row in self.data.chunks(n) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }
}
