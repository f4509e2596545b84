use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::pipeline::{build_model_inputs, Classification, PipelineOutput, PipelineSummary};
use crate::qif::{
    bayes_capacity, maxcase_capacity, posterior_bayes_vulnerability, posterior_g_vulnerability,
    prior_bayes_vulnerability, prior_g_vulnerability, Channel, Label, Prior,
};
use crate::topics::{
    bounded_noise_channel, cookies_leakage, generalization_bound, iba_gain, iba_posterior_bounds, k_anonymity_of,
    noise_bound_of, topics_leakage, topics_maxcase_capacity, CookieWorld, TopSet, TopicsChannels,
};

/// A measured capacity with the closed form evaluated on the data (when
/// there is one) and the data-independent bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Measured {
    pub measured: f64,
    pub formula: Option<f64>,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UtilityRow {
    pub channel: &'static str,
    pub secret: &'static str,
    pub prior_bayes: f64,
    pub posterior_bayes: f64,
    pub prior_iba: Option<f64>,
    pub posterior_iba: Option<f64>,
    /// `(1 - r, (1 - r) + r V)` for the report channel.
    pub iba_bounds: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n_users: usize,
    pub n_contexts: usize,
    pub m: usize,
    pub m_prime: usize,
    pub s: usize,
    pub r: f64,
    pub n_topsets: usize,
    pub k: usize,
    pub b: usize,
    pub cookies: Measured,
    pub generalization: Measured,
    pub bounded_noise: Measured,
    pub complete: Measured,
    pub maxcase: Option<Measured>,
    pub utility: Vec<UtilityRow>,
    pub summary: PipelineSummary,
}

fn utility_row(
    channel: &'static str,
    secret: &'static str,
    prior: &Prior,
    ch: &Channel,
    iba: Option<(&[TopSet], &[Label])>,
) -> Result<UtilityRow> {
    let (prior_iba, posterior_iba) = match iba {
        Some((sets, taxonomy)) => {
            let gain = iba_gain(sets, taxonomy)?;
            (Some(prior_g_vulnerability(prior, &gain)?), Some(posterior_g_vulnerability(prior, ch, &gain)?))
        }
        None => (None, None),
    };
    Ok(UtilityRow {
        channel,
        secret,
        prior_bayes: prior_bayes_vulnerability(prior),
        posterior_bayes: posterior_bayes_vulnerability(prior, ch)?,
        prior_iba,
        posterior_iba,
        iba_bounds: None,
    })
}

/// Privacy and utility figures for the users that survived the pipeline.
pub fn analyze(output: &PipelineOutput, classification: &Classification, r: f64) -> Result<AnalysisReport> {
    let inputs = build_model_inputs(&output.profiles, classification, r)?;
    let assignment = &inputs.assignment;
    let params = inputs.params;
    let taxonomy = assignment.taxonomy();
    let channels = TopicsChannels::build(assignment, &params)?;
    let users = assignment.histories().to_vec();
    let n = users.len();
    let contexts: BTreeSet<&str> =
        output.profiles.iter().flat_map(|p| p.history.iter().map(|v| v.domain.as_str())).collect();

    let linkage = Channel::identity(users.clone())?;
    let cookie_formula = CookieWorld::uniform(n, contexts.len()).and_then(|w| cookies_leakage(&w)).ok();
    let cookies = Measured { measured: bayes_capacity(&linkage), formula: cookie_formula, bound: n as f64 };

    let sets = assignment.distinct_sets();
    let generalization = Measured {
        measured: bayes_capacity(&channels.generalization),
        formula: Some(sets.len() as f64),
        bound: generalization_bound(&params),
    };

    let s = params.s() as f64;
    let m_prime = assignment.m_prime();
    let bounded_noise = Measured {
        measured: bayes_capacity(&channels.bounded_noise),
        formula: Some(m_prime as f64 / s),
        bound: params.m() as f64 / s,
    };

    let (formula, bound) = topics_leakage(&params)?;
    let complete = Measured { measured: bayes_capacity(&channels.complete), formula: Some(formula), bound };

    let maxcase = if r > 0.0 {
        let closed = topics_maxcase_capacity(&params)?;
        Some(Measured { measured: maxcase_capacity(&channels.complete)?, formula: Some(closed), bound: closed })
    } else {
        None
    };

    let weights: Vec<f64> =
        sets.iter().map(|set| assignment.sets().iter().filter(|x| *x == set).count() as f64).collect();
    let set_prior = Prior::from_weights(sets.iter().map(TopSet::label).collect(), &weights)?;
    let bn = bounded_noise_channel(&sets, taxonomy)?;
    let uniform = Prior::uniform(users)?;
    let mut report_row = utility_row("BN+DP", "top_set", &set_prior, &channels.report, Some((&sets, taxonomy)))?;
    report_row.iba_bounds = if r < 0.5 { Some(iba_posterior_bounds(&set_prior, &sets, &params)?) } else { None };
    let utility = vec![
        utility_row("U", "history", &uniform, &linkage, None)?,
        utility_row("G", "history", &uniform, &channels.generalization, None)?,
        utility_row("BN", "top_set", &set_prior, &bn, Some((&sets, taxonomy)))?,
        report_row,
    ];

    Ok(AnalysisReport {
        n_users: n,
        n_contexts: contexts.len(),
        m: params.m(),
        m_prime,
        s: params.s(),
        r,
        n_topsets: sets.len(),
        k: k_anonymity_of(&channels.generalization)?,
        b: noise_bound_of(&bn)?,
        cookies,
        generalization,
        bounded_noise,
        complete,
        maxcase,
        utility,
        summary: output.summary.clone(),
    })
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_default()
}

impl AnalysisReport {
    /// Two CSV sections: `privacy` rows and `utility` rows, capacities to
    /// two decimals and vulnerabilities to four.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value\n");
        for (name, v) in [
            ("N", self.n_users),
            ("c", self.n_contexts),
            ("m", self.m),
            ("m_prime", self.m_prime),
            ("s", self.s),
            ("n_topsets", self.n_topsets),
            ("k", self.k),
            ("B", self.b),
        ] {
            writeln!(out, "{name},{v}").expect("write to string");
        }
        writeln!(out, "r,{}", self.r).expect("write to string");
        out.push_str("\nchannel,measured,formula,bound\n");
        let mut privacy = vec![
            ("C_C", self.cookies),
            ("C_BH.C_G", self.generalization),
            ("C_BH.C_G.C_BN", self.bounded_noise),
            ("C_T", self.complete),
        ];
        if let Some(mc) = self.maxcase {
            privacy.push(("C_T maxcase", mc));
        }
        for (name, m) in privacy {
            writeln!(out, "{name},{:.2},{},{:.2}", m.measured, opt(m.formula, 2), m.bound).expect("write to string");
        }
        out.push_str("\nchannel,secret,prior_bayes,posterior_bayes,prior_iba,posterior_iba,iba_lower,iba_upper\n");
        for u in &self.utility {
            writeln!(
                out,
                "{},{},{:.4},{:.4},{},{},{},{}",
                u.channel,
                u.secret,
                u.prior_bayes,
                u.posterior_bayes,
                opt(u.prior_iba, 4),
                opt(u.posterior_iba, 4),
                opt(u.iba_bounds.map(|b| b.0), 4),
                opt(u.iba_bounds.map(|b| b.1), 4),
            )
            .expect("write to string");
        }
        out
    }
}
