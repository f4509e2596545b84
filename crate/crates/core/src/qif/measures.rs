//! Vulnerabilities, leakages and capacities.

use super::channel::{Channel, JointMatrix};
use super::compose::cascade;
use super::ensure_same_labels;
use super::gain::GainMatrix;
use super::label::Label;
use super::prior::Prior;
use crate::error::{Error, Result};

/// Best action against the prior alone, as `(action index, expected gain)`.
/// Ties go to the first action in axis order.
pub fn best_prior_action(prior: &Prior, gain: &GainMatrix) -> Result<(usize, f64)> {
    ensure_same_labels(gain.secrets(), prior.labels(), "gain secrets differ from prior labels")?;
    let mut best = (0, f64::NEG_INFINITY);
    for w in 0..gain.actions().len() {
        let v: f64 = gain.action_row(w).iter().zip(prior.probs()).map(|(g, p)| g * p).sum();
        if v > best.1 {
            best = (w, v);
        }
    }
    Ok(best)
}

/// `V_g(pi) = max_w sum_x pi_x g(w,x)`.
pub fn prior_g_vulnerability(prior: &Prior, gain: &GainMatrix) -> Result<f64> {
    best_prior_action(prior, gain).map(|(_, v)| v)
}

/// Best action per observable, with its contribution to the posterior
/// vulnerability. Ties go to the first action in axis order.
pub fn best_posterior_actions(prior: &Prior, channel: &Channel, gain: &GainMatrix) -> Result<Vec<(Label, Label, f64)>> {
    ensure_same_labels(prior.labels(), channel.rows(), "prior labels differ from channel rows")?;
    ensure_same_labels(gain.secrets(), channel.rows(), "gain secrets differ from channel rows")?;
    let n_rows = channel.n_rows();
    let mut column = vec![0.0; n_rows];
    let mut out = Vec::with_capacity(channel.n_cols());
    for y in 0..channel.n_cols() {
        for (x, slot) in column.iter_mut().enumerate() {
            *slot = prior.probs()[x] * channel.get(x, y);
        }
        let mut best = (0, f64::NEG_INFINITY);
        for w in 0..gain.actions().len() {
            let v: f64 = gain.action_row(w).iter().zip(&column).map(|(g, j)| g * j).sum();
            if v > best.1 {
                best = (w, v);
            }
        }
        out.push((channel.cols()[y].clone(), gain.actions()[best.0].clone(), best.1));
    }
    Ok(out)
}

/// `V_g[pi |> C] = sum_y max_w sum_x pi_x C[x,y] g(w,x)`.
pub fn posterior_g_vulnerability(prior: &Prior, channel: &Channel, gain: &GainMatrix) -> Result<f64> {
    Ok(best_posterior_actions(prior, channel, gain)?.iter().map(|(_, _, v)| v).sum())
}

/// Ratio of posterior to prior g-vulnerability.
pub fn multiplicative_leakage(prior: &Prior, channel: &Channel, gain: &GainMatrix) -> Result<f64> {
    let before = prior_g_vulnerability(prior, gain)?;
    if before <= 0.0 {
        return Err(Error::ZeroPriorVulnerability);
    }
    Ok(posterior_g_vulnerability(prior, channel, gain)? / before)
}

/// `V_1(pi) = max_x pi_x`.
pub fn prior_bayes_vulnerability(prior: &Prior) -> f64 {
    prior.probs().iter().copied().fold(0.0, f64::max)
}

/// `V_1[pi |> C]`, the sum of column maxima of the joint matrix.
pub fn posterior_bayes_vulnerability(prior: &Prior, channel: &Channel) -> Result<f64> {
    let joint = JointMatrix::new(prior, channel)?;
    let mut total = 0.0;
    for y in 0..joint.cols().len() {
        total += (0..joint.rows().len()).map(|x| joint.get(x, y)).fold(0.0, f64::max);
    }
    Ok(total)
}

/// Multiplicative Bayes capacity: the sum of column maxima of `C`.
pub fn bayes_capacity(channel: &Channel) -> f64 {
    (0..channel.n_cols()).map(|y| (0..channel.n_rows()).map(|x| channel.get(x, y)).fold(0.0, f64::max)).sum()
}

/// Max-case capacity: the largest within-column ratio `C[x,y] / C[x',y]`.
///
/// Every entry must be strictly positive; a zero makes the capacity infinite
/// and is reported as [`Error::ZeroEntry`].
pub fn maxcase_capacity(channel: &Channel) -> Result<f64> {
    let mut best: f64 = 1.0;
    for y in 0..channel.n_cols() {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for x in 0..channel.n_rows() {
            let v = channel.get(x, y);
            if v <= 0.0 {
                return Err(Error::ZeroEntry {
                    row: channel.rows()[x].to_string(),
                    col: channel.cols()[y].to_string(),
                });
            }
            hi = hi.max(v);
            lo = lo.min(v);
        }
        best = best.max(hi / lo);
    }
    Ok(best)
}

/// Local differential privacy parameter under the discrete metric.
pub fn epsilon_of(channel: &Channel) -> Result<f64> {
    maxcase_capacity(channel).map(f64::ln)
}

/// Leakage about a correlated secret `Z`, factored as a marginal `rho` and a
/// correlation channel `B : Z -> X`, through `system : X -> Y`.
pub fn dalenius_leakage(
    correlation_prior: &Prior,
    correlation_channel: &Channel,
    system: &Channel,
    gain: &GainMatrix,
) -> Result<f64> {
    let composed = cascade(correlation_channel, system)?;
    multiplicative_leakage(correlation_prior, &composed, gain)
}
