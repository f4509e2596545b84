use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::qif::{posterior_g_vulnerability, prior_g_vulnerability, Label, Prior};
use crate::topics::{
    bounded_noise_leakage, cookies_leakage, cookies_posterior_vulnerability, generalization_bound, iba_gain,
    iba_posterior_bounds, topics_epsilon, topics_leakage, topics_maxcase_capacity, topics_report_channel, CookieWorld,
    TheoryRow, TopSet, TopicsParams,
};

/// `m,r,s,avg_capacity,epsilon,max_capacity` with capacities to two
/// decimals and epsilon to three.
pub fn theory_csv(rows: &[TheoryRow]) -> String {
    let mut out = String::from("m,r,s,avg_capacity,epsilon,max_capacity\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{:.2},{:.3},{:.2}",
            row.m, row.r, row.s, row.avg_capacity, row.epsilon, row.max_capacity
        )
        .expect("write to string");
    }
    out
}

/// One worked example on the three-user world: a value, the bound it is
/// compared with (if any), and the parameters that produce it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkedRow {
    pub example: &'static str,
    pub parameters: String,
    pub value: f64,
    pub bound: Option<f64>,
}

fn row(example: &'static str, parameters: String, value: f64, bound: Option<f64>) -> WorkedRow {
    WorkedRow { example, parameters, value, bound }
}

/// The worked examples for the three-user world with top-sets
/// {Music, News} and {Sports, Travel}. Each example uses the parameter
/// reading that reproduces its printed value.
pub fn worked_examples() -> Result<Vec<WorkedRow>> {
    let world = CookieWorld::uniform(3, 5)?;
    let mut rows = vec![
        row("cookies_posterior_vulnerability", "N=3 c=5".into(), cookies_posterior_vulnerability(&world)?, None),
        row("cookies_leakage", "N=3 c=5".into(), cookies_leakage(&world)?, None),
    ];

    let gen = TopicsParams::new(4, 2, 0.05)?;
    rows.push(row("generalization_leakage", "m=4 s=2".into(), 2.0, Some(generalization_bound(&gen))));

    let bn = TopicsParams::new(4, 2, 0.05)?.with_m_prime(3)?;
    let (v, b) = bounded_noise_leakage(&bn)?;
    rows.push(row("bounded_noise_leakage", "m'=3 m=4 s=2".into(), v, Some(b)));

    let complete = TopicsParams::new(5, 2, 0.05)?.with_m_prime(4)?;
    let (v, b) = topics_leakage(&complete)?;
    rows.push(row("complete_leakage", "m'=4 m=5 s=2 r=0.05".into(), v, Some(b)));

    let eps = TopicsParams::new(4, 2, 0.05)?;
    rows.push(row("epsilon", "m=4 s=2 r=0.05".into(), topics_epsilon(&eps)?, None));
    rows.push(row("maxcase_capacity", "m=4 s=2 r=0.05".into(), topics_maxcase_capacity(&eps)?, None));

    let sets = vec![TopSet::from_strs(&["Music", "News"])?, TopSet::from_strs(&["Sports", "Travel"])?];
    let labels: Vec<Label> = sets.iter().map(TopSet::label).collect();
    let iba = TopicsParams::new(5, 2, 0.05)?;
    let taxonomy = Label::seq(&["Ads", "Music", "News", "Sports", "Travel"])?;
    for (name, weights) in [("skewed", [2.0, 1.0]), ("uniform", [1.0, 1.0])] {
        let prior = Prior::from_weights(labels.clone(), &weights)?;
        let gain = iba_gain(&sets, &taxonomy)?;
        let channel = topics_report_channel(&sets, &iba, &taxonomy)?;
        let prior_v = prior_g_vulnerability(&prior, &gain)?;
        let post_v = posterior_g_vulnerability(&prior, &channel, &gain)?;
        let (lo, hi) = iba_posterior_bounds(&prior, &sets, &iba)?;
        let params = format!("prior={name} m=5 s=2 r=0.05");
        rows.push(row("iba_prior", params.clone(), prior_v, None));
        rows.push(WorkedRow { example: "iba_posterior", parameters: params, value: post_v, bound: Some(hi) });
        debug_assert!(post_v >= lo - 1e-12);
    }
    Ok(rows)
}

/// `example,parameters,value,bound`, values to four decimals.
pub fn worked_csv(rows: &[WorkedRow]) -> String {
    let mut out = String::from("example,parameters,value,bound\n");
    for r in rows {
        let bound = r.bound.map(|b| format!("{b:.4}")).unwrap_or_default();
        writeln!(out, "{},{},{:.4},{}", r.example, r.parameters, r.value, bound).expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::{taxonomy_presets, theory_table};

    #[test]
    fn table_csv_rounding() {
        let text = theory_csv(&theory_table(&taxonomy_presets()).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "m,r,s,avg_capacity,epsilon,max_capacity");
        assert_eq!(lines[1], "349,0.05,5,66.36,7.191,1327.20");
        assert_eq!(lines[4], "1679,0.05,5,319.06,8.761,6381.20");
    }

    #[test]
    fn worked_values() {
        let rows = worked_examples().unwrap();
        let get = |name: &str| rows.iter().find(|r| r.example == name).unwrap();
        assert!((get("cookies_posterior_vulnerability").value - 26.0 / 3.0).abs() < 1e-12);
        assert_eq!(get("generalization_leakage").bound, Some(6.0));
        assert_eq!(get("bounded_noise_leakage").value, 1.5);
        assert!((get("complete_leakage").value - 1.95).abs() < 1e-12);
        assert!((get("maxcase_capacity").value - 39.0).abs() < 1e-9);
    }
}
