//! Per-user profiles, treatment rules and top-s selection.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::ingest::{AnnotatedVisit, Classification, VisitRecord};
use crate::error::{Error, Result};
use crate::qif::{Label, Prior};
use crate::topics::{TopSet, TopicAssignment, TopicsParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsufficientPolicy {
    Drop,
    Error,
}

/// Ties in topic counts are always broken by label, ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreatmentConfig {
    pub s: usize,
    pub drop_singletons: bool,
    pub outlier_max_visits: Option<usize>,
    pub insufficient_topics: InsufficientPolicy,
}

impl TreatmentConfig {
    pub fn new(s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::BadParams("s must be at least 1".into()));
        }
        Ok(TreatmentConfig {
            s,
            drop_singletons: true,
            outlier_max_visits: None,
            insufficient_topics: InsufficientPolicy::Drop,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UserProfile {
    pub user_id: Label,
    pub history: Vec<VisitRecord>,
    pub topic_counts: BTreeMap<Label, usize>,
    pub top_s: Option<Vec<Label>>,
}

impl UserProfile {
    pub fn distinct_domains(&self) -> BTreeSet<&str> {
        self.history.iter().map(|r| r.domain.as_str()).collect()
    }
}

/// Groups visits by user, ordered by user label; each history is sorted by
/// timestamp (stable, so ties keep file order).
pub fn group_by_user(records: &[VisitRecord]) -> Vec<UserProfile> {
    let mut by_user: BTreeMap<&Label, Vec<VisitRecord>> = BTreeMap::new();
    for r in records {
        by_user.entry(&r.user_id).or_default().push(r.clone());
    }
    by_user
        .into_iter()
        .map(|(user, mut history)| {
            history.sort_by_key(|r| r.timestamp);
            UserProfile { user_id: user.clone(), history, topic_counts: BTreeMap::new(), top_s: None }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreatmentReport {
    pub singletons: usize,
    pub outliers: usize,
    pub singleton_visits: usize,
    pub outlier_visits: usize,
}

/// Removes users who visited a single distinct domain (if configured) and
/// users with more than `outlier_max_visits` visits.
pub fn treat_users(profiles: Vec<UserProfile>, config: &TreatmentConfig) -> (Vec<UserProfile>, TreatmentReport) {
    let mut report = TreatmentReport::default();
    let kept = profiles
        .into_iter()
        .filter(|p| {
            if config.drop_singletons && p.distinct_domains().len() <= 1 {
                report.singletons += 1;
                report.singleton_visits += p.history.len();
                return false;
            }
            if config.outlier_max_visits.is_some_and(|max| p.history.len() > max) {
                report.outliers += 1;
                report.outlier_visits += p.history.len();
                return false;
            }
            true
        })
        .collect();
    (kept, report)
}

/// Counts visits per topic; a visit to a domain with several topics adds one
/// to each of them.
pub fn count_topics(visits: &[AnnotatedVisit]) -> BTreeMap<Label, usize> {
    let mut counts = BTreeMap::new();
    for v in visits {
        for t in &v.topics {
            *counts.entry(t.clone()).or_insert(0) += 1;
        }
    }
    counts
}

/// The first `s` topics by count descending, then label ascending. `None`
/// when fewer than `s` topics occur.
pub fn compute_top_s(counts: &BTreeMap<Label, usize>, s: usize) -> Option<Vec<Label>> {
    if counts.len() < s {
        return None;
    }
    let mut ranked: Vec<(&Label, usize)> = counts.iter().map(|(t, &c)| (t, c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Some(ranked.into_iter().take(s).map(|(t, _)| t.clone()).collect())
}

/// Fills counts and top-s sets from the annotated visits of each profile.
/// Users without enough topics are dropped or reported, per the policy.
/// Returns the kept profiles and the number dropped.
pub fn assign_top_s(
    profiles: Vec<UserProfile>,
    annotated: &BTreeMap<Label, Vec<AnnotatedVisit>>,
    config: &TreatmentConfig,
) -> Result<(Vec<UserProfile>, usize)> {
    let mut kept = Vec::with_capacity(profiles.len());
    let mut dropped = 0;
    for mut p in profiles {
        let visits = annotated.get(&p.user_id).map(Vec::as_slice).unwrap_or(&[]);
        p.topic_counts = count_topics(visits);
        match compute_top_s(&p.topic_counts, config.s) {
            Some(top) => {
                p.top_s = Some(top);
                kept.push(p);
            }
            None => match config.insufficient_topics {
                InsufficientPolicy::Drop => dropped += 1,
                InsufficientPolicy::Error => {
                    return Err(Error::InsufficientTopics {
                        user: p.user_id.to_string(),
                        found: p.topic_counts.len(),
                        s: config.s,
                    })
                }
            },
        }
    }
    Ok((kept, dropped))
}

/// Everything the channel builders need.
#[derive(Clone, Debug)]
pub struct ModelInputs {
    pub assignment: TopicAssignment,
    pub params: TopicsParams,
    pub prior: Prior,
}

impl ModelInputs {
    pub fn distinct_sets(&self) -> Vec<TopSet> {
        self.assignment.distinct_sets()
    }
}

/// Top-sets of every profile over the classification's taxonomy, with `m`,
/// `m'` from the data and a uniform prior over users.
pub fn build_model_inputs(profiles: &[UserProfile], classification: &Classification, r: f64) -> Result<ModelInputs> {
    let entries = profiles
        .iter()
        .map(|p| {
            let top = p.top_s.clone().ok_or_else(|| Error::IncompleteAssignment(p.user_id.to_string()))?;
            Ok((p.user_id.clone(), TopSet::new(top)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let assignment = TopicAssignment::new(entries, classification.taxonomy().to_vec())?;
    let params = assignment.params(r)?;
    let prior = Prior::uniform(assignment.histories().to_vec())?;
    Ok(ModelInputs { assignment, params, prior })
}

#[derive(Serialize)]
struct ProfileLine<'a> {
    user: &'a str,
    history: Vec<&'a str>,
    top_s: Option<&'a [Label]>,
}

/// Writes one JSON object per user: `{"user", "history", "top_s"}`.
pub fn write_profiles<W: Write>(mut out: W, profiles: &[UserProfile]) -> Result<()> {
    for p in profiles {
        let line = ProfileLine {
            user: p.user_id.as_str(),
            history: p.history.iter().map(|r| r.domain.as_str()).collect(),
            top_s: p.top_s.as_deref(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Splits visits into consecutive epochs of `length`, starting at the
/// earliest timestamp. Empty epochs in between are kept.
pub fn split_epochs(records: &[VisitRecord], length: Duration) -> Result<Vec<Vec<VisitRecord>>> {
    if length <= Duration::zero() {
        return Err(Error::BadParams("epoch length must be positive".into()));
    }
    let Some(start) = records.iter().map(|r| r.timestamp).min() else { return Ok(Vec::new()) };
    let index = |t: NaiveDateTime| ((t - start).num_milliseconds() / length.num_milliseconds()) as usize;
    let n = records.iter().map(|r| index(r.timestamp)).max().unwrap_or(0) + 1;
    let mut epochs = vec![Vec::new(); n];
    for r in records {
        epochs[index(r.timestamp)].push(r.clone());
    }
    Ok(epochs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::ingest::{parse_timestamp, MatchKind};

    fn counts(items: &[(&str, usize)]) -> BTreeMap<Label, usize> {
        items.iter().map(|&(t, c)| (Label::new(t).unwrap(), c)).collect()
    }

    fn names(top: Option<Vec<Label>>) -> Vec<String> {
        top.unwrap().into_iter().map(|l| l.to_string()).collect()
    }

    fn visits(user: &str, domains: &[&str]) -> Vec<VisitRecord> {
        domains
            .iter()
            .enumerate()
            .map(|(i, d)| VisitRecord {
                user_id: Label::new(user).unwrap(),
                timestamp: parse_timestamp(&format!("2006-03-01 10:00:{i:02}")).unwrap(),
                domain: d.to_string(),
            })
            .collect()
    }

    #[test]
    fn top_s_ordering() {
        assert_eq!(names(compute_top_s(&counts(&[("News", 3), ("Music", 2), ("Sports", 1)]), 2)), ["News", "Music"]);
        assert_eq!(names(compute_top_s(&counts(&[("B", 2), ("A", 2), ("C", 1)]), 2)), ["A", "B"]);
        assert_eq!(names(compute_top_s(&counts(&[("A", 3), ("C", 1), ("B", 1)]), 2)), ["A", "B"]);
        assert_eq!(compute_top_s(&counts(&[("A", 3)]), 5), None);
    }

    #[test]
    fn treatment_rules() {
        let mut records = visits("single", &["a.com"; 5]);
        records.extend(visits("pair", &["a.com", "b.com"]));
        records.extend(visits("heavy", &["a.com", "b.com", "c.com", "d.com"]));
        let mut config = TreatmentConfig::new(2).unwrap();
        config.outlier_max_visits = Some(3);
        let (kept, report) = treat_users(group_by_user(&records), &config);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].user_id.as_str(), "pair");
        assert_eq!((report.singletons, report.outliers), (1, 1));
    }

    #[test]
    fn insufficient_policy() {
        let profiles = group_by_user(&visits("u", &["a.com", "b.com"]));
        let topic = Label::new("News").unwrap();
        let annotated = BTreeMap::from([(
            Label::new("u").unwrap(),
            visits("u", &["a.com"])
                .into_iter()
                .map(|record| AnnotatedVisit { record, topics: vec![topic.clone()], matched: MatchKind::Full })
                .collect::<Vec<_>>(),
        )]);
        let mut config = TreatmentConfig::new(5).unwrap();
        let (kept, dropped) = assign_top_s(profiles.clone(), &annotated, &config).unwrap();
        assert!(kept.is_empty());
        assert_eq!(dropped, 1);
        config.insufficient_topics = InsufficientPolicy::Error;
        let err = assign_top_s(profiles, &annotated, &config).unwrap_err();
        assert!(matches!(err, Error::InsufficientTopics { found: 1, s: 5, .. }));
    }

    #[test]
    fn epochs_split_by_time() {
        let mut records = visits("u", &["a.com"]);
        let mut late = records[0].clone();
        late.timestamp += Duration::days(8);
        records.push(late);
        let epochs = split_epochs(&records, Duration::days(7)).unwrap();
        assert_eq!(epochs.len(), 2);
        assert_eq!(epochs[1].len(), 1);
    }

    #[test]
    fn profile_dump_format() {
        let mut p = group_by_user(&visits("u", &["a.com", "b.com"]));
        p[0].top_s = Some(Label::seq(&["A"]).unwrap());
        let mut buf = Vec::new();
        write_profiles(&mut buf, &p).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"user\":\"u\",\"history\":[\"a.com\",\"b.com\"],\"top_s\":[\"A\"]}\n"
        );
    }
}
