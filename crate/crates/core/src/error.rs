use thiserror::Error;

/// Errors produced anywhere in the analysis stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row} sums to {sum}, not 1")]
    NonStochasticRow { row: String, sum: f64 },
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: String, col: String, value: f64 },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("empty label")]
    EmptyLabel,
    #[error("label set is empty")]
    EmptyLabelSet,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("prior vulnerability is zero; multiplicative leakage undefined")]
    ZeroPriorVulnerability,
    #[error("channel has a zero entry at ({row}, {col}); max-case capacity is infinite")]
    ZeroEntry { row: String, col: String },
    #[error("bad probability: {0}")]
    BadProbability(String),
    #[error("matrix of {rows}x{cols} entries exceeds the cap of {cap}")]
    TooLarge { rows: usize, cols: usize, cap: usize },
    #[error("history {0:?} has no top-set assignment")]
    IncompleteAssignment(String),
    #[error("channel is not deterministic at row {0:?}")]
    NotDeterministic(String),
    #[error("topic {0:?} is not in the taxonomy")]
    TopicNotInTaxonomy(String),
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("bad cookie world: {0}")]
    BadWorld(String),
    #[error("m' (number of occurring topics) is required")]
    MissingMPrime,
    #[error("r must be strictly positive; epsilon is infinite at r = 0")]
    ZeroR,
    #[error("unparseable domain {input:?}: {reason}")]
    Unparseable { input: String, reason: &'static str },
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("classification is empty")]
    EmptyClassification,
    #[error("user {user:?} has {found} distinct topics, fewer than s = {s}")]
    InsufficientTopics { user: String, found: usize, s: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("top-set is empty")]
    EmptyTopSet,
    /// Carries the pipeline summary as JSON.
    #[error("no eligible users")]
    NoEligibleUsers { summary: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonStochasticRow { .. } => "NonStochasticRow",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::DuplicateLabel(_) => "DuplicateLabel",
            Error::EmptyLabel => "EmptyLabel",
            Error::EmptyLabelSet => "EmptyLabelSet",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::LabelMismatch(_) => "LabelMismatch",
            Error::ZeroPriorVulnerability => "ZeroPriorVulnerability",
            Error::ZeroEntry { .. } => "ZeroEntry",
            Error::BadProbability(_) => "BadProbability",
            Error::TooLarge { .. } => "MemoryCap",
            Error::IncompleteAssignment(_) => "IncompleteAssignment",
            Error::NotDeterministic(_) => "NotDeterministic",
            Error::TopicNotInTaxonomy(_) => "TopicNotInTaxonomy",
            Error::ParamMismatch(_) => "ParamMismatch",
            Error::BadWorld(_) => "BadWorld",
            Error::MissingMPrime => "MissingMPrime",
            Error::ZeroR => "ZeroR",
            Error::Unparseable { .. } => "Unparseable",
            Error::MalformedCsv(_) => "MalformedCsv",
            Error::EmptyClassification => "EmptyClassification",
            Error::InsufficientTopics { .. } => "InsufficientTopics",
            Error::BadParams(_) => "BadParams",
            Error::EmptyTopSet => "EmptyTopSet",
            Error::NoEligibleUsers { .. } => "NoEligibleUsers",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
