//! From browsing-history files to model inputs.
//!
//! The flow is: ingest and normalize visits, group by user, apply the
//! treatment rules, join the domain classification, pick each user's top-s
//! set, and collect the assignment, parameters and prior.

mod ingest;
mod profile;
mod suffix;
mod synth;

use std::collections::BTreeMap;
use std::io::Read;

use serde::Serialize;

pub use ingest::{
    ingest_history, join_classification, parse_taxonomy, parse_timestamp, AnnotatedVisit, Classification, Ingested,
    JoinStats, MatchKind, RejectLog, VisitRecord,
};
pub use profile::{
    assign_top_s, build_model_inputs, compute_top_s, count_topics, group_by_user, split_epochs, treat_users,
    write_profiles, InsufficientPolicy, ModelInputs, TreatmentConfig, TreatmentReport, UserProfile,
};
pub use suffix::{normalize_domain, SuffixList};
pub use synth::{domain_name, synth_generate, topic_name, SynthConfig, SynthWorld, Zipf, SYNTH_SUFFIX};

use crate::error::{Error, Result};
use crate::qif::Label;

/// Where every input row went.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub rows_in: usize,
    pub rejects: RejectLog,
    pub treatment: TreatmentReport,
    pub join: JoinStats,
    pub users_in: usize,
    pub users_insufficient: usize,
    pub users_out: usize,
}

impl PipelineSummary {
    /// Rows in equals rows annotated plus rows dropped for any reason.
    pub fn is_conserved(&self) -> bool {
        let rejected: usize = self.rejects.values().sum();
        let treated = self.treatment.singleton_visits + self.treatment.outlier_visits;
        self.rows_in == rejected + treated + self.join.unmatched + self.join.full + self.join.partial
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub profiles: Vec<UserProfile>,
    pub summary: PipelineSummary,
}

/// Runs every stage up to the top-s sets. Fails with
/// [`Error::NoEligibleUsers`] when nobody survives.
pub fn run_pipeline<R: Read>(
    history: R,
    suffixes: &SuffixList,
    classification: &Classification,
    config: &TreatmentConfig,
) -> Result<PipelineOutput> {
    let ingested = ingest_history(history, suffixes)?;
    let profiles = group_by_user(&ingested.records);
    let users_in = profiles.len();
    let (profiles, treatment) = treat_users(profiles, config);
    let kept: Vec<VisitRecord> = profiles.iter().flat_map(|p| p.history.iter().cloned()).collect();
    let (annotated, join) = join_classification(&kept, classification);
    let mut by_user: BTreeMap<Label, Vec<AnnotatedVisit>> = BTreeMap::new();
    for v in annotated {
        by_user.entry(v.record.user_id.clone()).or_default().push(v);
    }
    let (profiles, users_insufficient) = assign_top_s(profiles, &by_user, config)?;
    let summary = PipelineSummary {
        rows_in: ingested.rows_in,
        rejects: ingested.rejects,
        treatment,
        join,
        users_in,
        users_insufficient,
        users_out: profiles.len(),
    };
    debug_assert!(summary.is_conserved());
    if profiles.is_empty() {
        return Err(Error::NoEligibleUsers { summary: serde_json::to_string(&summary)? });
    }
    Ok(PipelineOutput { profiles, summary })
}
