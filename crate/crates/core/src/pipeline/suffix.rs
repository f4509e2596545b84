//! Public suffix list and registrable-domain extraction.
//!
//! Supports plain, wildcard (`*.`) and exception (`!`) rules. There is no
//! implicit `*` rule: a host with no matching rule has an empty suffix.

use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct SuffixList {
    rules: HashSet<String>,
    wildcards: HashSet<String>,
    exceptions: HashSet<String>,
}

impl SuffixList {
    /// Parses the public-suffix file format: one rule per line, `//`
    /// comments, anything after the first whitespace ignored.
    pub fn parse(text: &str) -> Self {
        let mut list = SuffixList::default();
        for line in text.lines() {
            let Some(rule) = line.split_whitespace().next() else { continue };
            if rule.starts_with("//") {
                continue;
            }
            let rule = rule.trim_start_matches('.').to_ascii_lowercase();
            if let Some(rest) = rule.strip_prefix("!") {
                list.exceptions.insert(rest.to_string());
            } else if let Some(rest) = rule.strip_prefix("*.") {
                list.wildcards.insert(rest.to_string());
            } else {
                list.rules.insert(rule);
            }
        }
        list
    }

    pub fn from_suffixes<S: AsRef<str>>(suffixes: &[S]) -> Self {
        let text: Vec<&str> = suffixes.iter().map(AsRef::as_ref).collect();
        SuffixList::parse(&text.join("\n"))
    }

    pub fn len(&self) -> usize {
        self.rules.len() + self.wildcards.len() + self.exceptions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Longest public suffix of `host`, or `None` when no rule matches.
    pub fn public_suffix<'a>(&self, host: &'a str) -> Option<&'a str> {
        let labels: Vec<&str> = host.split('.').collect();
        let n = labels.len();
        let tail = |k: usize| -> &'a str {
            let skip: usize = labels[..n - k].iter().map(|l| l.len() + 1).sum();
            &host[skip..]
        };
        let mut best = 0;
        for k in 1..=n {
            let candidate = tail(k);
            if self.exceptions.contains(candidate) {
                // An exception makes its own parent the suffix.
                return Some(tail(k - 1)).filter(|s| !s.is_empty());
            }
            if self.rules.contains(candidate) {
                best = k;
            }
            if k < n && self.wildcards.contains(candidate) {
                best = k + 1;
            }
        }
        (best > 0).then(|| tail(best))
    }
}

/// Reduces a URL or host to its registrable domain.
///
/// * `www.example.com` and `http://a.b.example.com/x` give `example.com`.
/// * A host equal to a multi-label suffix is kept (`gov.br`); one equal to a
///   single-label suffix (`com`) is rejected.
/// * A registrable label made only of `w`s is dropped when the suffix has
///   several labels (`www.gov.br` gives `gov.br`) and rejected otherwise.
pub fn normalize_domain(raw: &str, suffixes: &SuffixList) -> Result<String> {
    let host = extract_host(raw)?;
    let fail = |reason| Error::Unparseable { input: raw.to_string(), reason };
    for label in host.split('.') {
        if label.is_empty() {
            return Err(fail("empty label"));
        }
        if !label.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-') {
            return Err(fail("invalid characters"));
        }
        if label.starts_with('-') || label.ends_with('-') {
            return Err(fail("label starts or ends with a hyphen"));
        }
    }
    let suffix = suffixes.public_suffix(&host).ok_or_else(|| fail("empty suffix"))?;
    let multi_label = suffix.contains('.');
    if suffix.len() == host.len() {
        return if multi_label { Ok(host) } else { Err(fail("suffix without a domain")) };
    }
    let head = &host[..host.len() - suffix.len() - 1];
    let domain = head.rsplit('.').next().unwrap_or(head);
    if domain.bytes().all(|b| b == b'w') {
        return if multi_label { Ok(suffix.to_string()) } else { Err(fail("suffix without a domain")) };
    }
    Ok(format!("{domain}.{suffix}"))
}

fn extract_host(raw: &str) -> Result<String> {
    let raw = raw.trim();
    let fail = |reason| Error::Unparseable { input: raw.to_string(), reason };
    if raw.is_empty() {
        return Err(fail("empty input"));
    }
    let host = if raw.contains("://") {
        let url = url::Url::parse(raw).map_err(|_| fail("invalid URL"))?;
        url.host_str().ok_or_else(|| fail("URL without a host"))?.to_string()
    } else {
        let end = raw.find(['/', '?', '#']).unwrap_or(raw.len());
        let host = &raw[..end];
        let host = match host.rsplit_once(':') {
            Some((h, port)) if port.bytes().all(|b| b.is_ascii_digit()) => h,
            _ => host,
        };
        host.to_string()
    };
    Ok(host.trim_end_matches('.').to_ascii_lowercase())
}
