use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-empty text identifier for a row or column of a matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::EmptyLabel);
        }
        Ok(Label(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Builds a label sequence from string slices.
    pub fn seq<S: AsRef<str>>(items: &[S]) -> Result<Vec<Label>> {
        items.iter().map(|s| Label::new(s.as_ref())).collect()
    }

    /// Label of a pair of outcomes, e.g. for Kronecker and parallel products.
    pub fn pair(a: &Label, b: &Label) -> Label {
        Label(format!("{}|{}", a.0, b.0))
    }

    pub(crate) fn tagged(tag: &str, inner: &Label) -> Label {
        Label(format!("{tag}:{}", inner.0))
    }
}

impl TryFrom<String> for Label {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Label::new(value)
    }
}

impl TryFrom<&str> for Label {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        Label::new(value)
    }
}

impl From<Label> for String {
    fn from(label: Label) -> String {
        label.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub(crate) fn ensure_unique(labels: &[Label]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label) {
            return Err(Error::DuplicateLabel(label.0.clone()));
        }
    }
    Ok(())
}
