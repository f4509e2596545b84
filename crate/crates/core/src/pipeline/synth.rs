//! Seeded synthetic browsing worlds.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::SimRng;

/// Top-level suffix used by every synthetic domain.
pub const SYNTH_SUFFIX: &str = "test";

const SPAN_SECONDS: usize = 90 * 24 * 3600;
const MAX_TOPICS_PER_DOMAIN: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_users: usize,
    pub n_domains: usize,
    pub taxonomy_size: usize,
    pub min_visits: usize,
    pub max_visits: usize,
    pub zipf_exponent: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            n_users: 100,
            n_domains: 200,
            taxonomy_size: 30,
            min_visits: 5,
            max_visits: 40,
            zipf_exponent: 1.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.n_domains == 0 || self.taxonomy_size == 0 || self.min_visits == 0 {
            return Err(Error::BadParams("sizes and visit counts must be at least 1".into()));
        }
        if self.min_visits > self.max_visits {
            return Err(Error::BadParams(format!(
                "min_visits {} exceeds max_visits {}",
                self.min_visits, self.max_visits
            )));
        }
        if !(self.zipf_exponent.is_finite() && self.zipf_exponent >= 0.0) {
            return Err(Error::BadParams(format!("zipf exponent {} must be >= 0", self.zipf_exponent)));
        }
        Ok(())
    }
}

/// File contents of a generated world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthWorld {
    pub history_csv: String,
    pub classification_csv: String,
    pub taxonomy: String,
    pub suffix_list: String,
}

impl SynthWorld {
    pub const HISTORY: &'static str = "history.csv";
    pub const CLASSIFICATION: &'static str = "classification.csv";
    pub const TAXONOMY: &'static str = "taxonomy.txt";
    pub const SUFFIXES: &'static str = "suffixes.dat";

    /// Writes the four files into `dir` and returns their paths in the
    /// order history, classification, taxonomy, suffixes.
    pub fn write_to(&self, dir: &Path) -> Result<[PathBuf; 4]> {
        std::fs::create_dir_all(dir)?;
        let files = [
            (Self::HISTORY, &self.history_csv),
            (Self::CLASSIFICATION, &self.classification_csv),
            (Self::TAXONOMY, &self.taxonomy),
            (Self::SUFFIXES, &self.suffix_list),
        ];
        let mut paths: [PathBuf; 4] = Default::default();
        for (slot, (name, body)) in paths.iter_mut().zip(files) {
            *slot = dir.join(name);
            std::fs::write(&*slot, body)?;
        }
        Ok(paths)
    }
}

/// Inverse-CDF sampler for `P(k) ~ 1 / (k+1)^a`, `k = 0..n`.
#[derive(Clone, Debug)]
pub struct Zipf {
    cdf: Vec<f64>,
}

impl Zipf {
    pub fn new(n: usize, exponent: f64) -> Self {
        let mut acc = 0.0;
        let cdf = (0..n)
            .map(|k| {
                acc += ((k + 1) as f64).powf(-exponent);
                acc
            })
            .collect();
        Zipf { cdf }
    }

    pub fn sample(&self, rng: &mut SimRng) -> usize {
        let total = *self.cdf.last().expect("non-empty");
        let u = rng.uniform() * total;
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

pub fn topic_name(i: usize) -> String {
    format!("topic{i:04}")
}

pub fn domain_name(i: usize) -> String {
    format!("site{i:05}.{SYNTH_SUFFIX}")
}

/// Generates a world. Domain ranks follow a Zipf law, each domain carries
/// 1 to 3 topics, and visit times are spread over 90 days from 2006-03-01.
pub fn synth_generate(config: &SynthConfig) -> Result<SynthWorld> {
    config.validate()?;
    let mut rng = SimRng::new(config.seed);

    let mut taxonomy = String::new();
    for t in 0..config.taxonomy_size {
        writeln!(taxonomy, "{}", topic_name(t)).expect("write to string");
    }

    let mut classification = String::from("domain,topics\n");
    let mut pool: Vec<usize> = (0..config.taxonomy_size).collect();
    for d in 0..config.n_domains {
        let k = (1 + rng.uniform_index(MAX_TOPICS_PER_DOMAIN)).min(config.taxonomy_size);
        for i in 0..k {
            let j = i + rng.uniform_index(pool.len() - i);
            pool.swap(i, j);
        }
        let mut chosen = pool[..k].to_vec();
        chosen.sort_unstable();
        let topics: Vec<String> = chosen.into_iter().map(topic_name).collect();
        writeln!(classification, "{},{}", domain_name(d), topics.join(";")).expect("write to string");
    }

    let zipf = Zipf::new(config.n_domains, config.zipf_exponent);
    let start = NaiveDate::from_ymd_opt(2006, 3, 1).and_then(|d| d.and_hms_opt(0, 0, 0)).expect("valid date");
    let mut history = String::from("user_id,timestamp,url_or_domain\n");
    let spread = config.max_visits - config.min_visits + 1;
    for u in 0..config.n_users {
        let visits = config.min_visits + rng.uniform_index(spread);
        let mut rows: Vec<(usize, usize)> =
            (0..visits).map(|_| (rng.uniform_index(SPAN_SECONDS), zipf.sample(&mut rng))).collect();
        rows.sort_unstable();
        for (offset, domain) in rows {
            let ts = start + Duration::seconds(offset as i64);
            writeln!(history, "user{u:05},{},{}", ts.format("%Y-%m-%dT%H:%M:%S"), domain_name(domain))
                .expect("write to string");
        }
    }

    Ok(SynthWorld {
        history_csv: history,
        classification_csv: classification,
        taxonomy,
        suffix_list: format!("// synthetic suffix list\n{SYNTH_SUFFIX}\n"),
    })
}
