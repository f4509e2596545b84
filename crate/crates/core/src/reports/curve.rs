use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::run_counting_experiment;
use crate::topics::{counting_exact_probability, counting_params, TopicsParams};

/// Largest population accepted by [`counting_curve`].
pub const MAX_CURVE_N: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    #[serde(rename = "N")]
    pub n: u64,
    pub probability: f64,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_stderr: Option<f64>,
}

/// Probability of a correct count for every `N` in `ns` and every
/// parameter set, grouped by `m`. With `trials > 0` each point also gets a
/// Monte Carlo estimate seeded by `seed + N`.
pub fn counting_curve(
    ns: RangeInclusive<u64>,
    params: &[TopicsParams],
    trials: u64,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if ns.is_empty() || *ns.start() < 1 || *ns.end() > MAX_CURVE_N {
        return Err(Error::BadParams(format!(
            "N range {}..={} must lie within 1..={MAX_CURVE_N}",
            ns.start(),
            ns.end()
        )));
    }
    let mut jobs = Vec::new();
    for p in params {
        let cp = counting_params(p)?;
        jobs.extend(ns.clone().map(|n| (p.m(), n, cp)));
    }
    jobs.into_par_iter()
        .map(|(m, n, cp)| {
            let mc =
                if trials > 0 { Some(run_counting_experiment(n, cp, trials, seed.wrapping_add(n))?) } else { None };
            Ok(CurvePoint {
                n,
                probability: counting_exact_probability(n, cp),
                m,
                mc_estimate: mc.as_ref().map(|r| r.estimate),
                mc_stderr: mc.as_ref().map(|r| r.stderr),
            })
        })
        .collect()
}

/// `N,probability,m`, plus `mc_estimate,mc_stderr` when present.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let with_mc = points.iter().any(|p| p.mc_estimate.is_some());
    let mut out = String::from(if with_mc { "N,probability,m,mc_estimate,mc_stderr\n" } else { "N,probability,m\n" });
    for p in points {
        write!(out, "{},{:.6},{}", p.n, p.probability, p.m).expect("write to string");
        if with_mc {
            write!(out, ",{:.6},{:.6}", p.mc_estimate.unwrap_or(f64::NAN), p.mc_stderr.unwrap_or(f64::NAN))
                .expect("write to string");
        }
        out.push('\n');
    }
    out
}
