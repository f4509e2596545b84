//! The counting experiment: N users, each a member with probability 1/2,
//! each reporting membership through randomized response.

use rayon::prelude::*;

use super::rng::SimRng;
use super::sampling::SimReport;
use crate::error::{Error, Result};
use crate::topics::RandomizedResponse;

/// Default number of independently seeded partitions of the trial space.
pub const DEFAULT_PARTITIONS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    /// Every user is a member independently with probability 1/2.
    FairCoin,
    /// Exactly this many of the N users are members.
    Fixed(u64),
}

fn one_trial(n: u64, truth: Truth, rr: RandomizedResponse, rng: &mut SimRng) -> bool {
    let mut true_count = 0u64;
    let mut noisy = 0u64;
    for i in 0..n {
        let member = match truth {
            Truth::FairCoin => rng.bernoulli(0.5),
            Truth::Fixed(k) => i < k,
        };
        true_count += u64::from(member);
        noisy += u64::from(rng.bernoulli(if member { rr.p } else { rr.q }));
    }
    noisy == true_count
}

/// Fraction of trials whose noisy count equals the true count. Partition
/// `k` draws from sub-stream `k` of `seed`, so the result is fixed by
/// `(seed, trials, partitions)`.
pub fn run_counting_experiment_with(
    n: u64,
    truth: Truth,
    rr: impl Into<RandomizedResponse>,
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Result<SimReport> {
    let rr = rr.into();
    if trials == 0 {
        return Err(Error::BadParams("trials must be at least 1".into()));
    }
    if partitions == 0 {
        return Err(Error::BadParams("partitions must be at least 1".into()));
    }
    if let Truth::Fixed(k) = truth {
        if k > n {
            return Err(Error::BadParams(format!("true count {k} exceeds N = {n}")));
        }
    }
    let parts = partitions as u64;
    let hits: u64 = (0..parts)
        .into_par_iter()
        .map(|k| {
            let share = trials / parts + u64::from(k < trials % parts);
            let mut rng = SimRng::substream(seed, k);
            (0..share).filter(|_| one_trial(n, truth, rr, &mut rng)).count() as u64
        })
        .sum();
    let estimate = hits as f64 / trials as f64;
    Ok(SimReport { seed, trials, estimate, stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(), partitions })
}

pub fn run_counting_experiment(n: u64, rr: impl Into<RandomizedResponse>, trials: u64, seed: u64) -> Result<SimReport> {
    run_counting_experiment_with(n, Truth::FairCoin, rr, trials, seed, DEFAULT_PARTITIONS)
}

/// `P(Bin(k, p) + Bin(n - k, q) = k)`, the exact success probability with a
/// fixed true count.
pub fn fixed_truth_probability(n: u64, k: u64, rr: impl Into<RandomizedResponse>) -> f64 {
    let rr = rr.into();
    let pmf = |trials: u64, p: f64| -> Vec<f64> {
        let mut dist = vec![1.0];
        for _ in 0..trials {
            let mut next = vec![0.0; dist.len() + 1];
            for (j, &v) in dist.iter().enumerate() {
                next[j] += v * (1.0 - p);
                next[j + 1] += v * p;
            }
            dist = next;
        }
        dist
    };
    let a = pmf(k, rr.p);
    let b = pmf(n - k, rr.q);
    (0..=k as usize).filter_map(|i| b.get(k as usize - i).map(|bv| a[i] * bv)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::counting_exact_probability;

    #[test]
    fn perfect_reporting_always_counts() {
        let rr = RandomizedResponse::new(1.0, 0.0).unwrap();
        assert_eq!(run_counting_experiment(7, rr, 500, 1).unwrap().estimate, 1.0);
    }

    #[test]
    fn agrees_with_exact() {
        let rr = RandomizedResponse::new(0.3, 0.05).unwrap();
        let rep = run_counting_experiment(4, rr, 100_000, 3).unwrap();
        let exact = counting_exact_probability(4, rr);
        assert!((rep.estimate - exact).abs() < 4.0 * rep.stderr.max(1e-6));
    }

    #[test]
    fn fixed_truth_matches_binomial() {
        let rr = RandomizedResponse::new(0.6, 0.2).unwrap();
        let rep = run_counting_experiment_with(5, Truth::Fixed(2), rr, 100_000, 8, 4).unwrap();
        let exact = fixed_truth_probability(5, 2, rr);
        assert!((rep.estimate - exact).abs() < 4.0 * rep.stderr);
    }

    #[test]
    fn deterministic_for_partition_count() {
        let rr = RandomizedResponse::new(0.3, 0.05).unwrap();
        let a = run_counting_experiment_with(3, Truth::FairCoin, rr, 1001, 5, 3).unwrap();
        let b = run_counting_experiment_with(3, Truth::FairCoin, rr, 1001, 5, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fair_coin_is_average_of_fixed() {
        let rr = RandomizedResponse::new(0.3, 0.05).unwrap();
        let n = 6u64;
        let avg: f64 = (0..=n)
            .map(|k| crate::topics::binomial(n, k) * 0.5f64.powi(n as i32) * fixed_truth_probability(n, k, rr))
            .sum();
        assert!((avg - counting_exact_probability(n, rr)).abs() < 1e-12);
    }
}
