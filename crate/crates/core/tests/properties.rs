mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use common::*;
use topics_qif::pipeline::compute_top_s;
use topics_qif::qif::{
    bayes_capacity, cascade, external_choice, internal_choice, kronecker, maxcase_capacity, parallel,
    posterior_bayes_vulnerability, posterior_g_vulnerability,
};
use topics_qif::sim::{fixed_truth_probability, SimRng};
use topics_qif::topics::{
    binomial, counting_channel, counting_exact_probability, topics_report_channel, RandomizedResponse,
};
use topics_qif::{GainMatrix, Label, Prior, TopSet, TopicsParams};

const CASES: u32 = 128;

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases: CASES, failure_persistence: None, ..Config::default() },
        TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]),
    )
}

fn world_seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

#[test]
fn kronecker_capacity_is_multiplicative() {
    runner()
        .run(&(world_seed(), 1usize..5, 1usize..5, 1usize..4, 1usize..4), |(seed, a, b, c, d)| {
            let mut rng = SimRng::new(seed);
            let x = random_channel(&mut rng, a, b, true);
            let y = random_channel(&mut rng, c, d, true);
            let k = kronecker(&x, &y).unwrap();
            prop_assert!(close(bayes_capacity(&k), bayes_capacity(&x) * bayes_capacity(&y), 1e-9));
            Ok(())
        })
        .unwrap();
}

#[test]
fn external_choice_refines_internal() {
    runner()
        .run(&(world_seed(), 0.0f64..=1.0), |(seed, r)| {
            let mut rng = SimRng::new(seed);
            let a = random_channel(&mut rng, 3, 3, true);
            let b = random_channel(&mut rng, 3, 3, true);
            let prior = random_prior(&mut rng, 3);
            let gains = (0..3).map(|_| (0..3).map(|_| rng.uniform()).collect()).collect();
            let g = GainMatrix::new(labels("w", 3), labels("x", 3), gains).unwrap();
            let ext = posterior_g_vulnerability(&prior, &external_choice(&a, &b, r).unwrap(), &g).unwrap();
            let int = posterior_g_vulnerability(&prior, &internal_choice(&a, &b, r).unwrap(), &g).unwrap();
            prop_assert!(ext >= int - 1e-12);
            Ok(())
        })
        .unwrap();
}

#[test]
fn parallel_never_leaks_less() {
    runner()
        .run(&(world_seed(), 1usize..5, 1usize..4, 1usize..4), |(seed, n, k1, k2)| {
            let mut rng = SimRng::new(seed);
            let a = random_channel(&mut rng, n, k1, true);
            let b = random_channel(&mut rng, n, k2, true);
            let ab = parallel(&a, &b).unwrap();
            prop_assert!(bayes_capacity(&ab) >= bayes_capacity(&a).max(bayes_capacity(&b)) - 1e-12);
            prop_assert!(bayes_capacity(&ab) <= n as f64 + 1e-9);
            Ok(())
        })
        .unwrap();
}

#[test]
fn cascade_respects_data_processing() {
    runner()
        .run(&(world_seed(), 1usize..5, 1usize..5, 1usize..5), |(seed, n, k, j)| {
            let mut rng = SimRng::new(seed);
            let a = random_channel(&mut rng, n, k, true);
            let post = random_channel_between(&mut rng, labels("y", k), labels("z", j), true);
            let prior = random_prior(&mut rng, n);
            let before = posterior_bayes_vulnerability(&prior, &a).unwrap();
            let after = posterior_bayes_vulnerability(&prior, &cascade(&a, &post).unwrap()).unwrap();
            prop_assert!(after <= before + 1e-12);
            Ok(())
        })
        .unwrap();
}

#[test]
fn report_channel_capacity_matches_closed_form() {
    runner()
        .run(&(world_seed(), 2usize..12, 0.01f64..0.99), |(seed, m, r)| {
            let mut rng = SimRng::new(seed);
            let s = 1 + rng.uniform_index(m);
            let taxonomy = labels("t", m);
            let mut sets: Vec<TopSet> = Vec::new();
            while sets.len() < 4 {
                let set = random_topset(&mut rng, &taxonomy, s);
                if !sets.contains(&set) {
                    sets.push(set);
                }
                if binomial(m as u64, s as u64) as usize <= sets.len() {
                    break;
                }
            }
            let params = TopicsParams::new(m, s, r).unwrap();
            let ch = topics_report_channel(&sets, &params, &taxonomy).unwrap();
            let occurring: std::collections::BTreeSet<&Label> = sets.iter().flat_map(|x| x.topics()).collect();
            // Capacity is r + m'(1-r)/s whenever the m' occurring topics are
            // each the maximum of their column.
            let m_prime = occurring.len() as f64;
            let rest = (m as f64 - m_prime) * r / m as f64;
            let formula = m_prime * ((1.0 - r) / s as f64 + r / m as f64) + rest;
            prop_assert!(close(bayes_capacity(&ch), formula, 1e-9));
            prop_assert!(
                close(maxcase_capacity(&ch).unwrap(), 1.0 + m as f64 * (1.0 - r) / (r * s as f64), 1e-6)
                    || sets.len() == 1
            );
            Ok(())
        })
        .unwrap();
}

/// `P(noisy = true)` by enumerating all `4^N` (membership, report) outcomes.
fn brute_force_counting(n: u32, rr: RandomizedResponse) -> f64 {
    let mut total = 0.0;
    for members in 0u32..(1 << n) {
        for reports in 0u32..(1 << n) {
            let mut p = 0.5f64.powi(n as i32);
            for i in 0..n {
                let member = members >> i & 1 == 1;
                let report = reports >> i & 1 == 1;
                let yes = if member { rr.p } else { rr.q };
                p *= if report { yes } else { 1.0 - yes };
            }
            if members.count_ones() == reports.count_ones() {
                total += p;
            }
        }
    }
    total
}

/// Same quantity from the Kronecker power of the counting channel with the
/// count query applied to inputs and outputs.
fn kronecker_counting(n: u32, rr: RandomizedResponse) -> f64 {
    let single = counting_channel(rr).unwrap();
    let mut joint = single.clone();
    for _ in 1..n {
        joint = kronecker(&joint, &single).unwrap();
    }
    let count_in = |label: &Label| label.as_str().split('|').filter(|s| *s == "in").count();
    let prior = 0.5f64.powi(n as i32);
    let mut total = 0.0;
    for (i, row) in joint.rows().iter().enumerate() {
        for (j, col) in joint.cols().iter().enumerate() {
            if count_in(row) == count_in(col) {
                total += prior * joint.get(i, j);
            }
        }
    }
    total
}

#[test]
fn counting_probability_matches_enumeration() {
    runner()
        .run(&(1u32..=8, 0.0f64..=1.0, 0.0f64..=1.0), |(n, p, q)| {
            let rr = RandomizedResponse::new(p, q).unwrap();
            let exact = counting_exact_probability(u64::from(n), rr);
            prop_assert!(close(exact, kronecker_counting(n, rr), 1e-9));
            if n <= 5 {
                prop_assert!(close(exact, brute_force_counting(n, rr), 1e-9));
            }
            let mixed: f64 = (0..=u64::from(n))
                .map(|k| {
                    binomial(u64::from(n), k) * 0.5f64.powi(n as i32) * fixed_truth_probability(u64::from(n), k, rr)
                })
                .sum();
            prop_assert!(close(exact, mixed, 1e-9));
            Ok(())
        })
        .unwrap();
}

/// Best `s`-subset by enumeration: highest total count, ties broken by the
/// lexicographically smallest list of descending-rank labels.
fn top_s_by_enumeration(counts: &BTreeMap<Label, usize>, s: usize) -> Option<Vec<Label>> {
    let items: Vec<(&Label, usize)> = counts.iter().map(|(l, &c)| (l, c)).collect();
    if items.len() < s {
        return None;
    }
    let mut best: Option<(usize, Vec<(usize, &Label)>)> = None;
    for mask in 0u32..(1 << items.len()) {
        if mask.count_ones() as usize != s {
            continue;
        }
        let mut chosen: Vec<(usize, &Label)> =
            (0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| (items[i].1, items[i].0)).collect();
        chosen.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        let total: usize = chosen.iter().map(|c| c.0).sum();
        let key: Vec<(std::cmp::Reverse<usize>, &Label)> =
            chosen.iter().map(|c| (std::cmp::Reverse(c.0), c.1)).collect();
        let better = match &best {
            None => true,
            Some((t, prev)) => {
                let prev_key: Vec<(std::cmp::Reverse<usize>, &Label)> =
                    prev.iter().map(|c| (std::cmp::Reverse(c.0), c.1)).collect();
                total > *t || (total == *t && key < prev_key)
            }
        };
        if better {
            best = Some((total, chosen));
        }
    }
    best.map(|(_, chosen)| chosen.into_iter().map(|(_, l)| l.clone()).collect())
}

#[test]
fn top_s_matches_subset_enumeration() {
    let strategy = (prop::collection::vec(0usize..6, 1..9), 1usize..5);
    runner()
        .run(&strategy, |(counts, s)| {
            let counts: BTreeMap<Label, usize> =
                counts.iter().enumerate().map(|(i, &c)| (Label::new(format!("t{i}")).unwrap(), c)).collect();
            prop_assert_eq!(compute_top_s(&counts, s), top_s_by_enumeration(&counts, s));
            Ok(())
        })
        .unwrap();
}

#[test]
fn uniform_prior_attains_capacity() {
    runner()
        .run(&(world_seed(), 1usize..6, 1usize..6), |(seed, n, k)| {
            let mut rng = SimRng::new(seed);
            let c = random_channel(&mut rng, n, k, true);
            let uniform = Prior::uniform(labels("x", n)).unwrap();
            let v = posterior_bayes_vulnerability(&uniform, &c).unwrap() * n as f64;
            prop_assert!(close(v, bayes_capacity(&c), 1e-9));
            let other = random_prior(&mut rng, n);
            let leak =
                posterior_bayes_vulnerability(&other, &c).unwrap() / other.probs().iter().cloned().fold(0.0, f64::max);
            prop_assert!(leak <= bayes_capacity(&c) + 1e-9);
            Ok(())
        })
        .unwrap();
}
