use super::label::{ensure_unique, Label};
use crate::error::{Error, Result};

/// Gain function `g : W x X -> R>=0` as an action-by-secret table.
#[derive(Clone, Debug, PartialEq)]
pub struct GainMatrix {
    actions: Vec<Label>,
    secrets: Vec<Label>,
    gains: Vec<f64>,
}

impl GainMatrix {
    pub fn new(actions: Vec<Label>, secrets: Vec<Label>, gains: Vec<Vec<f64>>) -> Result<Self> {
        if actions.is_empty() || secrets.is_empty() {
            return Err(Error::EmptyLabelSet);
        }
        ensure_unique(&actions)?;
        ensure_unique(&secrets)?;
        if gains.len() != actions.len() {
            return Err(Error::DimensionMismatch(format!("{} actions but {} gain rows", actions.len(), gains.len())));
        }
        let mut flat = Vec::with_capacity(actions.len() * secrets.len());
        for (action, row) in actions.iter().zip(&gains) {
            if row.len() != secrets.len() {
                return Err(Error::DimensionMismatch(format!(
                    "gain row {action} has {} entries, expected {}",
                    row.len(),
                    secrets.len()
                )));
            }
            for (secret, &g) in secrets.iter().zip(row) {
                if !g.is_finite() || g < 0.0 {
                    return Err(Error::NegativeEntry { row: action.to_string(), col: secret.to_string(), value: g });
                }
            }
            flat.extend_from_slice(row);
        }
        Ok(GainMatrix { actions, secrets, gains: flat })
    }

    /// The identity gain `g_id`: actions are guesses of the secret itself.
    pub fn identity(labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLabelSet);
        }
        ensure_unique(&labels)?;
        let n = labels.len();
        let mut gains = vec![0.0; n * n];
        for i in 0..n {
            gains[i * n + i] = 1.0;
        }
        Ok(GainMatrix { actions: labels.clone(), secrets: labels, gains })
    }

    pub fn actions(&self) -> &[Label] {
        &self.actions
    }

    pub fn secrets(&self) -> &[Label] {
        &self.secrets
    }

    pub fn gain(&self, action: usize, secret: usize) -> f64 {
        self.gains[action * self.secrets.len() + secret]
    }

    pub fn action_row(&self, action: usize) -> &[f64] {
        let n = self.secrets.len();
        &self.gains[action * n..(action + 1) * n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.gains.chunks(self.secrets.len()).map(<[f64]>::to_vec).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_gain_rejected() {
        let a = Label::seq(&["w"]).unwrap();
        let x = Label::seq(&["x", "y"]).unwrap();
        assert!(matches!(GainMatrix::new(a, x, vec![vec![1.0, -0.5]]), Err(Error::NegativeEntry { .. })));
    }

    #[test]
    fn identity_gain_shape() {
        let g = GainMatrix::identity(Label::seq(&["a", "b", "c"]).unwrap()).unwrap();
        assert_eq!(g.gain(1, 1), 1.0);
        assert_eq!(g.gain(1, 2), 0.0);
        assert_eq!(g.actions(), g.secrets());
    }
}
