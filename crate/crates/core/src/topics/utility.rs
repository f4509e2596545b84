//! Utility for the advertiser: the IBA gain and the counting experiment.

use super::formulas::ln_binomial;
use super::types::{dedup_first, ensure_in_taxonomy, CountingParams, RandomizedResponse, TopSet, TopicsParams};
use crate::error::{Error, Result};
use crate::qif::{prior_g_vulnerability, Channel, GainMatrix, Label, Prior};

/// `g_IBA(t, sigma) = 1` iff `t` is in `sigma`. Actions are the taxonomy
/// topics, secrets the (deduplicated) top-sets.
pub fn iba_gain(topsets: &[TopSet], taxonomy: &[Label]) -> Result<GainMatrix> {
    let sets = dedup_first(topsets);
    for set in &sets {
        ensure_in_taxonomy(set, taxonomy)?;
    }
    let gains = taxonomy.iter().map(|t| sets.iter().map(|s| if s.contains(t) { 1.0 } else { 0.0 }).collect()).collect();
    GainMatrix::new(taxonomy.to_vec(), sets.iter().map(TopSet::label).collect(), gains)
}

/// Bounds on the posterior IBA vulnerability of the report channel:
/// `(1 - r, (1 - r) + r V(prior))`. The prior is over `topsets` in order.
///
/// Only valid for `r < 0.5`.
pub fn iba_posterior_bounds(prior: &Prior, topsets: &[TopSet], params: &TopicsParams) -> Result<(f64, f64)> {
    let r = params.r();
    if r >= 0.5 {
        return Err(Error::BadProbability(format!("the IBA bounds need r < 0.5, got {r}")));
    }
    let taxonomy: Vec<Label> = {
        let mut all: Vec<Label> = topsets.iter().flat_map(|s| s.topics().iter().cloned()).collect();
        all.sort();
        all.dedup();
        all
    };
    let gain = iba_gain(topsets, &taxonomy)?;
    let v = prior_g_vulnerability(prior, &gain)?;
    Ok((1.0 - r, (1.0 - r) + r * v))
}

/// `p = (1-r)/s + r/m`, `q = r/m`.
pub fn counting_params(params: &TopicsParams) -> Result<CountingParams> {
    if params.r() <= 0.0 {
        return Err(Error::ZeroR);
    }
    let q = params.r() / params.m() as f64;
    let p = (1.0 - params.r()) / params.s() as f64 + q;
    CountingParams::new(p, q)
}

/// Randomized response on "is topic t in the user's top-set":
/// rows and columns `in`, `out`; entries `[[p, 1-p], [q, 1-q]]`.
pub fn counting_channel(rr: impl Into<RandomizedResponse>) -> Result<Channel> {
    let RandomizedResponse { p, q } = rr.into();
    let labels = Label::seq(&["in", "out"])?;
    Channel::new(labels.clone(), labels, vec![vec![p, 1.0 - p], vec![q, 1.0 - q]])
}

/// `sum_{n=0}^{N} C(N, n) p^n (1-q)^(N-n)`, summed in log space.
///
/// Analytically this is `(p + 1 - q)^N`, which exceeds 1 whenever `p > q`;
/// it is not a probability.
pub fn counting_power_approximation(n: u64, rr: impl Into<RandomizedResponse>) -> f64 {
    let RandomizedResponse { p, q } = rr.into();
    let (ln_p, ln_1q) = (p.ln(), (1.0 - q).ln());
    let terms: Vec<f64> = (0..=n).map(|k| ln_binomial(n, k) + term(k, ln_p) + term(n - k, ln_1q)).collect();
    log_sum_exp(&terms).exp()
}

fn term(count: u64, ln_x: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_x
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Probability that the noisy count of a topic equals the true count when
/// each of `n` users holds the topic independently with probability 1/2.
///
/// Each user shifts `noisy - true` by -1 (holds it, not reported), +1 (does
/// not hold it, reported) or 0, so the answer is the mass at 0 of the
/// `n`-fold convolution of that three-point law.
pub fn counting_exact_probability(n: u64, rr: impl Into<RandomizedResponse>) -> f64 {
    let RandomizedResponse { p, q } = rr.into();
    let down = (1.0 - p) / 2.0;
    let stay = (p + 1.0 - q) / 2.0;
    let up = q / 2.0;
    let n = n as usize;
    // dist[k] is P(difference = k - n).
    let mut dist = vec![0.0; 2 * n + 1];
    let mut next = dist.clone();
    dist[n] = 1.0;
    for step in 0..n {
        let (lo, hi) = (n - step, n + step);
        next[lo - 1..=hi + 1].iter_mut().for_each(|v| *v = 0.0);
        for k in lo..=hi {
            let v = dist[k];
            next[k - 1] += v * down;
            next[k] += v * stay;
            next[k + 1] += v * up;
        }
        std::mem::swap(&mut dist, &mut next);
    }
    dist[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qif::{posterior_g_vulnerability, Channel};
    use crate::topics::channels::{bounded_noise_channel, topics_report_channel};

    fn l(items: &[&str]) -> Vec<Label> {
        Label::seq(items).unwrap()
    }

    fn three_users_sets() -> Vec<TopSet> {
        vec![TopSet::from_strs(&["Music", "News"]).unwrap(), TopSet::from_strs(&["Sports", "Travel"]).unwrap()]
    }

    fn taxonomy() -> Vec<Label> {
        l(&["Music", "News", "Sports", "Travel", "Ads"])
    }

    #[test]
    fn iba_gain_cases() {
        let g = iba_gain(&three_users_sets(), &taxonomy()).unwrap();
        assert_eq!(g.gain(0, 0), 1.0);
        assert_eq!(g.gain(0, 1), 0.0);
        let stray = iba_gain(&[TopSet::from_strs(&["Cars"]).unwrap()], &taxonomy());
        assert!(matches!(stray, Err(Error::TopicNotInTaxonomy(_))));
    }

    #[test]
    fn iba_three_user_example() {
        let sets = three_users_sets();
        let g = iba_gain(&sets, &taxonomy()).unwrap();
        let labels: Vec<Label> = sets.iter().map(TopSet::label).collect();
        let params = TopicsParams::new(5, 2, 0.05).unwrap();
        let c = topics_report_channel(&sets, &params, &taxonomy()).unwrap();
        let skewed = Prior::new(labels.clone(), vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((prior_g_vulnerability(&skewed, &g).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((posterior_g_vulnerability(&skewed, &c, &g).unwrap() - 0.976_666_666_666_666_7).abs() < 1e-12);
        let uniform = Prior::uniform(labels).unwrap();
        assert!((posterior_g_vulnerability(&uniform, &c, &g).unwrap() - 0.975).abs() < 1e-12);
        let (lo, hi) = iba_posterior_bounds(&uniform, &sets, &params).unwrap();
        assert!((lo - 0.95).abs() < 1e-12 && (hi - 0.975).abs() < 1e-12);
    }

    #[test]
    fn iba_bounds_edges() {
        let sets = three_users_sets();
        let uniform = Prior::uniform(sets.iter().map(TopSet::label).collect()).unwrap();
        assert_eq!(iba_posterior_bounds(&uniform, &sets, &TopicsParams::new(5, 2, 0.0).unwrap()).unwrap(), (1.0, 1.0));
        let shared = vec![TopSet::from_strs(&["A", "B"]).unwrap(), TopSet::from_strs(&["A", "C"]).unwrap()];
        let p = Prior::uniform(shared.iter().map(TopSet::label).collect()).unwrap();
        let (lo, hi) = iba_posterior_bounds(&p, &shared, &TopicsParams::new(5, 2, 0.05).unwrap()).unwrap();
        assert!((lo - 0.95).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        let high_r = iba_posterior_bounds(&p, &shared, &TopicsParams::new(5, 2, 0.5).unwrap());
        assert!(matches!(high_r, Err(Error::BadProbability(_))));
    }

    #[test]
    fn bounded_noise_is_always_genuine() {
        let sets = three_users_sets();
        let g = iba_gain(&sets, &taxonomy()).unwrap();
        let bn = bounded_noise_channel(&sets, &taxonomy()).unwrap();
        let p = Prior::new(sets.iter().map(TopSet::label).collect(), vec![0.9, 0.1]).unwrap();
        assert!((posterior_g_vulnerability(&p, &bn, &g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counting_params_values() {
        let cp = counting_params(&TopicsParams::new(349, 5, 0.05).unwrap()).unwrap();
        assert!((cp.q() - 0.00014326647564469913).abs() < 1e-18);
        assert!((cp.a() - 1327.2).abs() < 1e-9);
        let cp = counting_params(&TopicsParams::new(629, 5, 0.05).unwrap()).unwrap();
        assert!((cp.a() - 2391.2).abs() < 1e-9);
        assert!(matches!(counting_params(&TopicsParams::new(5, 5, 1.0).unwrap()), Err(Error::BadProbability(_))));
        assert!(matches!(counting_params(&TopicsParams::new(5, 2, 0.0).unwrap()), Err(Error::ZeroR)));
    }

    #[test]
    fn counting_channel_shapes() {
        let id = counting_channel(RandomizedResponse::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(id, Channel::identity(l(&["in", "out"])).unwrap());
        let flat = counting_channel(RandomizedResponse::new(0.3, 0.3).unwrap()).unwrap();
        assert!((crate::qif::bayes_capacity(&flat) - 1.0).abs() < 1e-12);
        let cp = counting_params(&TopicsParams::new(349, 5, 0.05).unwrap()).unwrap();
        let c = counting_channel(cp).unwrap();
        assert!((c.get(0, 0) - 0.19014).abs() < 1e-5);
        assert!((c.get(0, 1) - 0.80986).abs() < 1e-5);
    }

    #[test]
    fn power_approximation_is_a_power() {
        let cp = counting_params(&TopicsParams::new(349, 5, 0.05).unwrap()).unwrap();
        let base = cp.p() + 1.0 - cp.q();
        assert!((counting_power_approximation(1, cp) - base).abs() < 1e-12);
        assert!((counting_power_approximation(10, cp) - base.powi(10)).abs() < 1e-9);
        assert!((counting_power_approximation(10, cp) - 5.6947).abs() < 1e-3);
        let sure = RandomizedResponse::new(1.0, 0.0).unwrap();
        assert!((counting_power_approximation(12, sure) - 4096.0).abs() < 1e-6);
    }

    #[test]
    fn exact_probability_small_cases() {
        let cp = counting_params(&TopicsParams::new(349, 5, 0.05).unwrap()).unwrap();
        assert!((counting_exact_probability(1, cp) - (cp.p() + 1.0 - cp.q()) / 2.0).abs() < 1e-15);
        assert!((counting_exact_probability(10, cp) - 0.0056).abs() < 5e-4);
        assert_eq!(counting_exact_probability(0, cp), 1.0);
        assert!((counting_exact_probability(7, RandomizedResponse::new(1.0, 0.0).unwrap()) - 1.0).abs() < 1e-12);
    }
}
