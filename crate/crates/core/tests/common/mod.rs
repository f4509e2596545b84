#![allow(dead_code)]

use std::path::PathBuf;

use topics_qif::pipeline::{parse_taxonomy, run_pipeline, Classification, PipelineOutput, SuffixList, TreatmentConfig};
use topics_qif::sim::SimRng;
use topics_qif::{Channel, Label, Prior, TopSet, TopicAssignment, TopicsParams};

pub fn labels(prefix: &str, n: usize) -> Vec<Label> {
    (0..n).map(|i| Label::new(format!("{prefix}{i}")).unwrap()).collect()
}

/// Random channel; with `zeros` about a third of the entries are zero.
pub fn random_channel(rng: &mut SimRng, rows: usize, cols: usize, zeros: bool) -> Channel {
    random_channel_between(rng, labels("x", rows), labels("y", cols), zeros)
}

pub fn random_channel_between(rng: &mut SimRng, rows: Vec<Label>, cols: Vec<Label>, zeros: bool) -> Channel {
    let n_cols = cols.len();
    let entries = (0..rows.len())
        .map(|_| {
            let mut row: Vec<f64> =
                (0..n_cols).map(|_| if zeros && rng.uniform() < 0.33 { 0.0 } else { rng.uniform() + 1e-3 }).collect();
            if row.iter().all(|&v| v == 0.0) {
                row[rng.uniform_index(n_cols)] = 1.0;
            }
            let total: f64 = row.iter().sum();
            row.iter().map(|v| v / total).collect()
        })
        .collect();
    Channel::new(rows, cols, entries).unwrap()
}

pub fn random_prior(rng: &mut SimRng, n: usize) -> Prior {
    let weights: Vec<f64> = (0..n).map(|_| rng.uniform() + 1e-3).collect();
    Prior::from_weights(labels("x", n), &weights).unwrap()
}

pub fn random_topset(rng: &mut SimRng, taxonomy: &[Label], s: usize) -> TopSet {
    let mut idx: Vec<usize> = (0..taxonomy.len()).collect();
    for i in 0..s {
        let j = i + rng.uniform_index(taxonomy.len() - i);
        idx.swap(i, j);
    }
    TopSet::new(idx[..s].iter().map(|&i| taxonomy[i].clone()).collect()).unwrap()
}

pub fn three_users_taxonomy() -> Vec<Label> {
    Label::seq(&["Music", "News", "Sports", "Travel", "Ads"]).unwrap()
}

/// Alice and Carol share {Music, News}; Bob has {Sports, Travel}.
pub fn three_users_assignment() -> TopicAssignment {
    let mn = TopSet::from_strs(&["Music", "News"]).unwrap();
    let st = TopSet::from_strs(&["Sports", "Travel"]).unwrap();
    TopicAssignment::new(
        vec![
            (Label::new("Alice").unwrap(), mn.clone()),
            (Label::new("Bob").unwrap(), st),
            (Label::new("Carol").unwrap(), mn),
        ],
        three_users_taxonomy(),
    )
    .unwrap()
}

pub fn three_users_params() -> TopicsParams {
    three_users_assignment().params(0.05).unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/three_users").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn three_users_classification() -> Classification {
    let taxonomy = parse_taxonomy(&std::fs::read_to_string(fixture("taxonomy.txt")).unwrap()).unwrap();
    Classification::from_csv(std::fs::File::open(fixture("classification.csv")).unwrap(), Some(taxonomy)).unwrap()
}

pub fn three_users_pipeline() -> PipelineOutput {
    let suffixes = SuffixList::parse(&std::fs::read_to_string(fixture("suffixes.dat")).unwrap());
    let history = std::fs::File::open(fixture("history.csv")).unwrap();
    run_pipeline(history, &suffixes, &three_users_classification(), &TreatmentConfig::new(2).unwrap()).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
