//! Theoretical limits per parameter set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::formulas::{topics_capacity, topics_epsilon, topics_maxcase_capacity};
use super::types::TopicsParams;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub m: usize,
    pub r: f64,
    pub s: usize,
    pub avg_capacity: f64,
    pub epsilon: f64,
    pub max_capacity: f64,
}

pub fn theory_row(params: &TopicsParams) -> Result<TheoryRow> {
    Ok(TheoryRow {
        m: params.m(),
        r: params.r(),
        s: params.s(),
        avg_capacity: topics_capacity(params),
        epsilon: topics_epsilon(params)?,
        max_capacity: topics_maxcase_capacity(params)?,
    })
}

pub fn theory_table(params: &[TopicsParams]) -> Result<Vec<TheoryRow>> {
    params.par_iter().map(theory_row).collect()
}

fn grid(rows: &[(usize, usize, f64)]) -> Vec<TopicsParams> {
    rows.iter().map(|&(m, s, r)| TopicsParams::new(m, s, r).expect("valid preset")).collect()
}

/// The four proposed taxonomies at `s = 5`, `r = 0.05`.
pub fn taxonomy_presets() -> Vec<TopicsParams> {
    grid(&[(349, 5, 0.05), (629, 5, 0.05), (1091, 5, 0.05), (1679, 5, 0.05)])
}

/// Parameter combinations trading `r` and `s` against a larger taxonomy.
pub fn tradeoff_presets() -> Vec<TopicsParams> {
    grid(&[
        (349, 5, 0.05),
        (629, 5, 0.05),
        (629, 5, 0.47),
        (629, 6, 0.37),
        (629, 7, 0.26),
        (629, 8, 0.15),
        (629, 9, 0.05),
    ])
}

/// The two classified datasets: 31 and 169 occurring topics.
pub fn dataset_presets() -> Vec<TopicsParams> {
    grid(&[(31, 5, 0.05), (169, 5, 0.05)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_rows() {
        let rows = theory_table(&dataset_presets()).unwrap();
        assert!((rows[0].avg_capacity - 5.94).abs() < 0.005);
        assert!((rows[0].epsilon - 4.777).abs() < 0.0005);
        assert!((rows[0].max_capacity - 118.8).abs() < 0.05);
        assert!((rows[1].avg_capacity - 32.16).abs() < 0.005);
        assert!((rows[1].epsilon - 6.466).abs() < 0.0005);
        assert!((rows[1].max_capacity - 643.2).abs() < 0.05);
    }

    #[test]
    fn order_is_preserved() {
        let rows = theory_table(&tradeoff_presets()).unwrap();
        let ms: Vec<(usize, usize)> = rows.iter().map(|r| (r.m, r.s)).collect();
        assert_eq!(ms, vec![(349, 5), (629, 5), (629, 5), (629, 6), (629, 7), (629, 8), (629, 9)]);
    }
}
