//! Third-party cookie tracking as a seeded process.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::rng::SimRng;
use crate::error::Result;
use crate::qif::{Channel, Label};
use crate::topics::{deterministic_channel, CookieWorld};

/// One report received by a third-party origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CookieReport {
    pub uid: String,
    pub origin: String,
    pub context: String,
    pub timestamp: u64,
    /// Ground truth, not part of what the origin sees.
    #[serde(skip)]
    pub user: String,
}

/// A browser's cookie jar: one uid per origin, created on first contact.
#[derive(Clone, Debug, Default)]
pub struct CookieJar {
    cookies: HashMap<String, String>,
}

impl CookieJar {
    pub fn len(&self) -> usize {
        self.cookies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cookies.is_empty()
    }

    /// Visits `context`, which embeds `origins`; returns one report per
    /// origin.
    pub fn visit(
        &mut self,
        user: &str,
        context: &str,
        origins: &[String],
        timestamp: u64,
        rng: &mut SimRng,
    ) -> Vec<CookieReport> {
        origins
            .iter()
            .map(|origin| {
                let uid =
                    self.cookies.entry(origin.clone()).or_insert_with(|| format!("{:016x}", rng.next_u64())).clone();
                CookieReport {
                    uid,
                    origin: origin.clone(),
                    context: context.to_string(),
                    timestamp,
                    user: user.to_string(),
                }
            })
            .collect()
    }
}

pub fn context_name(i: usize) -> String {
    format!("ctx{i}")
}

pub fn user_name(i: usize) -> String {
    format!("user{i}")
}

/// Every user visits `h` distinct contexts, each embedding the single
/// tracker origin. History sizes are drawn uniformly in `2..=c` when the
/// world does not fix them.
pub fn simulate_cookie_session(world: &CookieWorld, rng: &mut SimRng) -> Result<Vec<CookieReport>> {
    world.validate()?;
    let origins = vec!["tracker.example".to_string()];
    let c = world.n_contexts;
    let mut log = Vec::new();
    let mut clock = 0;
    for u in 0..world.n_users {
        let h = world.history_sizes.get(u).copied().unwrap_or_else(|| 2 + rng.uniform_index(c - 1));
        let mut contexts: Vec<usize> = (0..c).collect();
        for i in 0..h {
            let j = i + rng.uniform_index(c - i);
            contexts.swap(i, j);
        }
        let mut jar = CookieJar::default();
        let user = user_name(u);
        for &ctx in &contexts[..h] {
            clock += 1;
            log.extend(jar.visit(&user, &context_name(ctx), &origins, clock, rng));
        }
    }
    Ok(log)
}

/// Writes `uid,origin,context,timestamp`.
pub fn write_cookie_log<W: Write>(out: W, log: &[CookieReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in log {
        w.serialize(r).map_err(|e| crate::error::Error::MalformedCsv(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Empirical linkage channel from users to uids, from the ground truth
/// attached to each report.
pub fn linkage_channel(log: &[CookieReport]) -> Result<Channel> {
    let mut counts: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    let mut cols: Vec<&str> = Vec::new();
    for r in log {
        if !cols.contains(&r.uid.as_str()) {
            cols.push(&r.uid);
        }
        *counts.entry(&r.user).or_default().entry(&r.uid).or_default() += 1;
    }
    let rows: Vec<Label> = counts.keys().map(|u| Label::new(*u)).collect::<Result<_>>()?;
    let entries = counts
        .values()
        .map(|row| {
            let total: usize = row.values().sum();
            cols.iter().map(|c| row.get(c).map_or(0.0, |&n| n as f64 / total as f64)).collect()
        })
        .collect();
    Channel::new(rows, cols.iter().map(|c| Label::new(*c)).collect::<Result<_>>()?, entries)
}

/// What the tracker learns: the set of contexts seen under each uid.
pub fn reconstruct_histories(log: &[CookieReport]) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in log {
        out.entry(r.uid.clone()).or_default().insert(r.context.clone());
    }
    out
}

/// The cookies channel: each user mapped to the set of contexts in their
/// history.
pub fn cookies_channel<S: AsRef<str> + Ord>(histories: &[(Label, BTreeSet<S>)]) -> Result<Channel> {
    let pairs = histories
        .iter()
        .map(|(user, contexts)| {
            let names: Vec<&str> = contexts.iter().map(AsRef::as_ref).collect();
            Ok((user.clone(), Label::new(format!("{{{}}}", names.join(",")))?))
        })
        .collect::<Result<Vec<_>>>()?;
    deterministic_channel(&pairs)
}
