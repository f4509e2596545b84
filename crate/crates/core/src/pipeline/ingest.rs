//! Browsing-history and classification files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::suffix::{normalize_domain, SuffixList};
use crate::error::{Error, Result};
use crate::qif::Label;

/// One visit with a normalized domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitRecord {
    pub user_id: Label,
    pub timestamp: NaiveDateTime,
    pub domain: String,
}

/// Rejected rows counted by reason.
pub type RejectLog = BTreeMap<String, usize>;

#[derive(Clone, Debug, Default)]
pub struct Ingested {
    pub records: Vec<VisitRecord>,
    pub rejects: RejectLog,
    pub rows_in: usize,
}

const HISTORY_HEADER: [&str; 3] = ["user_id", "timestamp", "url_or_domain"];

/// Accepts RFC 3339 (offsets are folded into UTC) or a naive
/// `YYYY-MM-DD[T ]HH:MM:SS`.
pub fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    let text = text.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(dt.naive_utc());
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
}

/// Reads a history CSV with header `user_id,timestamp,url_or_domain`.
/// Bad rows are counted in the reject log; only a bad header is fatal.
pub fn ingest_history<R: Read>(reader: R, suffixes: &SuffixList) -> Result<Ingested> {
    let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = csv.headers().map_err(|e| Error::MalformedCsv(e.to_string()))?;
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != HISTORY_HEADER {
        return Err(Error::MalformedCsv(format!(
            "expected header {}, found {}",
            HISTORY_HEADER.join(","),
            names.join(",")
        )));
    }
    let mut out = Ingested::default();
    for row in csv.records() {
        out.rows_in += 1;
        let reason = match row {
            Err(_) => Err("malformed_row"),
            Ok(row) if row.len() != 3 => Err("malformed_row"),
            Ok(row) => parse_row(&row, suffixes).map(|r| out.records.push(r)),
        };
        if let Err(reason) = reason {
            *out.rejects.entry(reason.to_string()).or_default() += 1;
        }
    }
    Ok(out)
}

fn parse_row(row: &csv::StringRecord, suffixes: &SuffixList) -> std::result::Result<VisitRecord, &'static str> {
    let user = row[0].trim();
    let url = row[2].trim();
    if user.is_empty() {
        return Err("no_user");
    }
    if url.is_empty() {
        return Err("no_url");
    }
    let timestamp = parse_timestamp(&row[1]).ok_or("bad_timestamp")?;
    let domain = normalize_domain(url, suffixes).map_err(|_| "unparseable")?;
    Ok(VisitRecord { user_id: Label::new(user).map_err(|_| "no_user")?, timestamp, domain })
}

/// Domains mapped to their topics, over a fixed taxonomy.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    map: HashMap<String, Vec<Label>>,
    taxonomy: Vec<Label>,
}

impl Classification {
    /// With no taxonomy given, the sorted distinct topics of the map are used.
    pub fn new(map: HashMap<String, Vec<Label>>, taxonomy: Option<Vec<Label>>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::EmptyClassification);
        }
        let taxonomy = match taxonomy {
            Some(t) => {
                crate::qif::ensure_unique_labels(&t)?;
                t
            }
            None => {
                let all: BTreeSet<&Label> = map.values().flatten().collect();
                all.into_iter().cloned().collect()
            }
        };
        let known: BTreeSet<&Label> = taxonomy.iter().collect();
        for (domain, topics) in &map {
            if topics.is_empty() {
                return Err(Error::MalformedCsv(format!("domain {domain} has no topics")));
            }
            if let Some(t) = topics.iter().find(|t| !known.contains(t)) {
                return Err(Error::TopicNotInTaxonomy(t.to_string()));
            }
        }
        Ok(Classification { map, taxonomy })
    }

    /// Reads CSV with header `domain,topics`; topics are `;`-separated.
    pub fn from_csv<R: Read>(reader: R, taxonomy: Option<Vec<Label>>) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let header = csv.headers().map_err(|e| Error::MalformedCsv(e.to_string()))?;
        if header.iter().map(str::trim).collect::<Vec<_>>() != ["domain", "topics"] {
            return Err(Error::MalformedCsv("expected header domain,topics".into()));
        }
        let mut map: HashMap<String, Vec<Label>> = HashMap::new();
        for row in csv.records() {
            let row = row.map_err(|e| Error::MalformedCsv(e.to_string()))?;
            let domain = row[0].trim().to_ascii_lowercase();
            let mut topics = row[1]
                .split(';')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(Label::new)
                .collect::<Result<Vec<_>>>()?;
            topics.sort();
            topics.dedup();
            let entry = map.entry(domain).or_default();
            entry.extend(topics);
            entry.sort();
            entry.dedup();
        }
        Classification::new(map, taxonomy)
    }

    pub fn taxonomy(&self) -> &[Label] {
        &self.taxonomy
    }

    pub fn topics_of(&self, domain: &str) -> Option<&[Label]> {
        self.map.get(domain).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Reads a taxonomy file: one topic per line, blank lines and `#` comments
/// skipped.
pub fn parse_taxonomy(text: &str) -> Result<Vec<Label>> {
    let topics = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(Label::new)
        .collect::<Result<Vec<_>>>()?;
    crate::qif::ensure_unique_labels(&topics)?;
    Ok(topics)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Full,
    Partial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedVisit {
    pub record: VisitRecord,
    pub topics: Vec<Label>,
    pub matched: MatchKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinStats {
    pub full: usize,
    pub partial: usize,
    pub unmatched: usize,
}

/// Attaches topics to each visit: an exact domain match first, then the
/// longest classified ancestor domain. Unmatched visits are dropped.
pub fn join_classification(
    records: &[VisitRecord],
    classification: &Classification,
) -> (Vec<AnnotatedVisit>, JoinStats) {
    let mut stats = JoinStats::default();
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        match lookup(&record.domain, classification) {
            Some((topics, matched)) => {
                match matched {
                    MatchKind::Full => stats.full += 1,
                    MatchKind::Partial => stats.partial += 1,
                }
                out.push(AnnotatedVisit { record: record.clone(), topics: topics.to_vec(), matched });
            }
            None => stats.unmatched += 1,
        }
    }
    (out, stats)
}

fn lookup<'a>(domain: &str, classification: &'a Classification) -> Option<(&'a [Label], MatchKind)> {
    if let Some(t) = classification.topics_of(domain) {
        return Some((t, MatchKind::Full));
    }
    let mut rest = domain;
    while let Some((_, parent)) = rest.split_once('.') {
        if let Some(t) = classification.topics_of(parent) {
            return Some((t, MatchKind::Partial));
        }
        rest = parent;
    }
    None
}
