use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qif::Label;

/// The API parameters: taxonomy size `m`, top-set size `s`, random-topic
/// probability `r`, and optionally the number of topics that actually occur.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicsParams {
    m: usize,
    s: usize,
    r: f64,
    m_prime: Option<usize>,
}

impl TopicsParams {
    /// `r` may be 1, which makes the report channel the uniform one.
    pub fn new(m: usize, s: usize, r: f64) -> Result<Self> {
        if m == 0 || s == 0 {
            return Err(Error::BadParams(format!("m = {m} and s = {s} must be positive")));
        }
        if s > m {
            return Err(Error::BadParams(format!("s = {s} exceeds m = {m}")));
        }
        if !(r.is_finite() && (0.0..=1.0).contains(&r)) {
            return Err(Error::BadProbability(format!("r = {r} outside [0, 1]")));
        }
        Ok(TopicsParams { m, s, r, m_prime: None })
    }

    pub fn with_m_prime(mut self, m_prime: usize) -> Result<Self> {
        if m_prime == 0 || m_prime > self.m {
            return Err(Error::BadParams(format!("m' = {m_prime} must lie in 1..={}", self.m)));
        }
        self.m_prime = Some(m_prime);
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn m_prime(&self) -> Option<usize> {
        self.m_prime
    }
}

/// A top-s set: distinct topics kept in label order. Its label is
/// `{A,B,...}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Label>", into = "Vec<Label>")]
pub struct TopSet(Vec<Label>);

impl TopSet {
    pub fn new(topics: Vec<Label>) -> Result<Self> {
        if topics.is_empty() {
            return Err(Error::EmptyTopSet);
        }
        let n = topics.len();
        let set: BTreeSet<Label> = topics.into_iter().collect();
        if set.len() != n {
            return Err(Error::DuplicateLabel("repeated topic in top-set".into()));
        }
        Ok(TopSet(set.into_iter().collect()))
    }

    pub fn from_strs<S: AsRef<str>>(topics: &[S]) -> Result<Self> {
        TopSet::new(Label::seq(topics)?)
    }

    pub fn topics(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, topic: &Label) -> bool {
        self.0.binary_search(topic).is_ok()
    }

    pub fn label(&self) -> Label {
        Label::new(self.to_string()).expect("non-empty")
    }
}

impl fmt::Display for TopSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(t.as_str())?;
        }
        f.write_str("}")
    }
}

impl TryFrom<Vec<Label>> for TopSet {
    type Error = Error;

    fn try_from(v: Vec<Label>) -> Result<Self> {
        TopSet::new(v)
    }
}

impl From<TopSet> for Vec<Label> {
    fn from(t: TopSet) -> Self {
        t.0
    }
}

/// Histories mapped to their top-s sets, over a fixed taxonomy.
#[derive(Clone, Debug, PartialEq)]
pub struct TopicAssignment {
    histories: Vec<Label>,
    sets: Vec<TopSet>,
    taxonomy: Vec<Label>,
}

impl TopicAssignment {
    pub fn new(entries: Vec<(Label, TopSet)>, taxonomy: Vec<Label>) -> Result<Self> {
        if entries.is_empty() || taxonomy.is_empty() {
            return Err(Error::EmptyLabelSet);
        }
        crate::qif::ensure_unique_labels(&taxonomy)?;
        let (histories, sets): (Vec<Label>, Vec<TopSet>) = entries.into_iter().unzip();
        crate::qif::ensure_unique_labels(&histories)?;
        let s = sets[0].len();
        for (h, set) in histories.iter().zip(&sets) {
            if set.len() != s {
                return Err(Error::ParamMismatch(format!(
                    "history {h} has a top-set of size {}, expected {s}",
                    set.len()
                )));
            }
            ensure_in_taxonomy(set, &taxonomy)?;
        }
        Ok(TopicAssignment { histories, sets, taxonomy })
    }

    /// Builds the assignment for `histories` in the given order, looking each
    /// one up in `map`.
    pub fn from_map(histories: &[Label], map: &HashMap<Label, TopSet>, taxonomy: Vec<Label>) -> Result<Self> {
        let entries = histories
            .iter()
            .map(|h| {
                map.get(h).map(|set| (h.clone(), set.clone())).ok_or_else(|| Error::IncompleteAssignment(h.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        TopicAssignment::new(entries, taxonomy)
    }

    pub fn histories(&self) -> &[Label] {
        &self.histories
    }

    pub fn sets(&self) -> &[TopSet] {
        &self.sets
    }

    pub fn taxonomy(&self) -> &[Label] {
        &self.taxonomy
    }

    pub fn set_of(&self, history: &Label) -> Option<&TopSet> {
        self.histories.iter().position(|h| h == history).map(|i| &self.sets[i])
    }

    pub fn s(&self) -> usize {
        self.sets[0].len()
    }

    pub fn m(&self) -> usize {
        self.taxonomy.len()
    }

    /// Distinct top-sets in first-occurrence order.
    pub fn distinct_sets(&self) -> Vec<TopSet> {
        dedup_first(&self.sets)
    }

    /// Topics that appear in at least one top-set, in taxonomy order.
    pub fn occurring_topics(&self) -> Vec<Label> {
        let seen: BTreeSet<&Label> = self.sets.iter().flat_map(|s| s.topics()).collect();
        self.taxonomy.iter().filter(|t| seen.contains(t)).cloned().collect()
    }

    pub fn m_prime(&self) -> usize {
        self.occurring_topics().len()
    }

    /// `TopicsParams` with `m`, `s` and `m'` taken from the data.
    pub fn params(&self, r: f64) -> Result<TopicsParams> {
        TopicsParams::new(self.m(), self.s(), r)?.with_m_prime(self.m_prime())
    }
}

pub(crate) fn dedup_first(sets: &[TopSet]) -> Vec<TopSet> {
    let mut seen = BTreeSet::new();
    sets.iter().filter(|s| seen.insert(*s)).cloned().collect()
}

pub(crate) fn ensure_in_taxonomy(set: &TopSet, taxonomy: &[Label]) -> Result<()> {
    match set.topics().iter().find(|t| !taxonomy.contains(t)) {
        Some(t) => Err(Error::TopicNotInTaxonomy(t.to_string())),
        None => Ok(()),
    }
}

/// The cookies world: `N` users over `c` contexts; each user's history
/// covers `h` of them, `2 <= h <= c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CookieWorld {
    pub n_users: usize,
    pub n_contexts: usize,
    pub history_sizes: Vec<usize>,
}

impl CookieWorld {
    pub fn new(n_users: usize, n_contexts: usize, history_sizes: Vec<usize>) -> Result<Self> {
        let world = CookieWorld { n_users, n_contexts, history_sizes };
        world.validate()?;
        Ok(world)
    }

    /// A world where nothing is known about the individual histories.
    pub fn uniform(n_users: usize, n_contexts: usize) -> Result<Self> {
        CookieWorld::new(n_users, n_contexts, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 {
            return Err(Error::BadWorld("N must be positive".into()));
        }
        if self.n_contexts < 2 {
            return Err(Error::BadWorld(format!("c = {} is below 2", self.n_contexts)));
        }
        if !self.history_sizes.is_empty() && self.history_sizes.len() != self.n_users {
            return Err(Error::BadWorld(format!(
                "{} history sizes for {} users",
                self.history_sizes.len(),
                self.n_users
            )));
        }
        if let Some(h) = self.history_sizes.iter().find(|&&h| h < 2 || h > self.n_contexts) {
            return Err(Error::BadWorld(format!("history size {h} outside 2..={}", self.n_contexts)));
        }
        Ok(())
    }
}

/// Parameters of the two-point randomized-response channel for the counting
/// experiment. `p` is the chance a user whose top-set holds the topic reports
/// it, `q` the chance for a user whose set does not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingParams {
    p: f64,
    q: f64,
}

impl CountingParams {
    /// Requires `0 < q < p < 1`.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(0.0 < q && q < p && p < 1.0) {
            return Err(Error::BadProbability(format!("need 0 < q < p < 1, got p = {p}, q = {q}")));
        }
        Ok(CountingParams { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `A = p / q`.
    pub fn a(&self) -> f64 {
        self.p / self.q
    }

    pub fn response(&self) -> RandomizedResponse {
        RandomizedResponse { p: self.p, q: self.q }
    }
}

/// Unrestricted two-point reporting probabilities, `p, q` in `[0, 1]`.
/// Covers the degenerate ends (`p = 1, q = 0`; `p = q`) that
/// [`CountingParams`] rejects.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomizedResponse {
    pub p: f64,
    pub q: f64,
}

impl RandomizedResponse {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for v in [p, q] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::BadProbability(format!("{v} outside [0, 1]")));
            }
        }
        Ok(RandomizedResponse { p, q })
    }
}

impl From<CountingParams> for RandomizedResponse {
    fn from(cp: CountingParams) -> Self {
        cp.response()
    }
}
