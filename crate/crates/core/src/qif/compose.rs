//! Channel compositions: cascade, internal and external fixed-probability
//! choice, parallel composition and the Kronecker product.

use super::channel::Channel;
use super::label::Label;
use super::{ensure_same_labels, ensure_within_cap};
use crate::error::{Error, Result};

fn check_probability(r: f64) -> Result<()> {
    if r.is_finite() && (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::BadProbability(format!("choice probability {r} outside [0, 1]")))
    }
}

/// `first` followed by `second`, i.e. the matrix product.
pub fn cascade(first: &Channel, second: &Channel) -> Result<Channel> {
    ensure_same_labels(first.cols(), second.rows(), "first channel outputs differ from second channel inputs")?;
    let (n, k, m) = (first.n_rows(), first.n_cols(), second.n_cols());
    ensure_within_cap(n, m)?;
    let mut data = vec![0.0; n * m];
    for i in 0..n {
        let out = &mut data[i * m..(i + 1) * m];
        for j in 0..k {
            let a = first.get(i, j);
            if a == 0.0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(second.row(j)) {
                *o += a * b;
            }
        }
    }
    Channel::from_flat(first.rows().to_vec(), second.cols().to_vec(), data)
}

/// Internal fixed-probability choice `a (+)_r b`.
///
/// Output columns are the union of both output sets: the columns of `a` in
/// order, then columns only present in `b` in `b`'s order. With probability
/// `1 - r` the output comes from `a`, with probability `r` from `b`, and the
/// observer cannot tell which.
pub fn internal_choice(a: &Channel, b: &Channel, r: f64) -> Result<Channel> {
    ensure_same_labels(a.rows(), b.rows(), "internal choice needs identical inputs")?;
    check_probability(r)?;
    let mut cols = a.cols().to_vec();
    cols.extend(b.cols().iter().filter(|c| a.col_index(c).is_none()).cloned());
    ensure_within_cap(a.n_rows(), cols.len())?;
    let b_index: Vec<Option<usize>> = cols.iter().map(|c| b.col_index(c)).collect();
    let a_cols = a.n_cols();
    let mut data = Vec::with_capacity(a.n_rows() * cols.len());
    for x in 0..a.n_rows() {
        for (y, bj) in b_index.iter().enumerate() {
            let from_a = if y < a_cols { (1.0 - r) * a.get(x, y) } else { 0.0 };
            let from_b = bj.map_or(0.0, |j| r * b.get(x, j));
            data.push(from_a + from_b);
        }
    }
    Channel::from_flat(a.rows().to_vec(), cols, data)
}

/// External fixed-probability choice `a [+]_r b`: like the internal choice,
/// but the observer learns which branch ran. Output columns are tagged
/// `1:<y>` for `a` and `2:<y>` for `b`.
pub fn external_choice(a: &Channel, b: &Channel, r: f64) -> Result<Channel> {
    ensure_same_labels(a.rows(), b.rows(), "external choice needs identical inputs")?;
    check_probability(r)?;
    let cols: Vec<Label> =
        a.cols().iter().map(|c| Label::tagged("1", c)).chain(b.cols().iter().map(|c| Label::tagged("2", c))).collect();
    ensure_within_cap(a.n_rows(), cols.len())?;
    let mut data = Vec::with_capacity(a.n_rows() * cols.len());
    for x in 0..a.n_rows() {
        data.extend(a.row(x).iter().map(|v| (1.0 - r) * v));
        data.extend(b.row(x).iter().map(|v| r * v));
    }
    Channel::from_flat(a.rows().to_vec(), cols, data)
}

/// Parallel composition `a || b`: both channels run independently on the
/// same secret and the observer sees the pair of outputs.
pub fn parallel(a: &Channel, b: &Channel) -> Result<Channel> {
    ensure_same_labels(a.rows(), b.rows(), "parallel composition needs identical inputs")?;
    let n_cols = a.n_cols().checked_mul(b.n_cols()).ok_or(Error::TooLarge {
        rows: a.n_rows(),
        cols: usize::MAX,
        cap: super::entry_cap(),
    })?;
    ensure_within_cap(a.n_rows(), n_cols)?;
    let cols = pair_labels(a.cols(), b.cols());
    let mut data = Vec::with_capacity(a.n_rows() * n_cols);
    for x in 0..a.n_rows() {
        for &va in a.row(x) {
            data.extend(b.row(x).iter().map(|vb| va * vb));
        }
    }
    Channel::from_flat(a.rows().to_vec(), cols, data)
}

/// Kronecker product `a (x) b` over both axes.
pub fn kronecker(a: &Channel, b: &Channel) -> Result<Channel> {
    let n_rows = a.n_rows().checked_mul(b.n_rows());
    let n_cols = a.n_cols().checked_mul(b.n_cols());
    let (n_rows, n_cols) = match (n_rows, n_cols) {
        (Some(r), Some(c)) => (r, c),
        _ => return Err(Error::TooLarge { rows: usize::MAX, cols: usize::MAX, cap: super::entry_cap() }),
    };
    ensure_within_cap(n_rows, n_cols)?;
    let rows = pair_labels(a.rows(), b.rows());
    let cols = pair_labels(a.cols(), b.cols());
    let mut data = Vec::with_capacity(n_rows * n_cols);
    for x in 0..a.n_rows() {
        for x2 in 0..b.n_rows() {
            for &va in a.row(x) {
                data.extend(b.row(x2).iter().map(|vb| va * vb));
            }
        }
    }
    Channel::from_flat(rows, cols, data)
}

fn pair_labels(first: &[Label], second: &[Label]) -> Vec<Label> {
    first.iter().flat_map(|a| second.iter().map(move |b| Label::pair(a, b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qif::measures::bayes_capacity;

    fn l(items: &[&str]) -> Vec<Label> {
        Label::seq(items).unwrap()
    }

    fn sample() -> Channel {
        Channel::new(l(&["a", "b"]), l(&["x", "y", "z"]), vec![vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3]]).unwrap()
    }

    #[test]
    fn cascade_with_identities() {
        let c = sample();
        let right = Channel::identity(c.cols().to_vec()).unwrap();
        let left = Channel::identity(c.rows().to_vec()).unwrap();
        assert!(cascade(&c, &right).unwrap().max_abs_diff(&c).unwrap() < 1e-15);
        assert!(cascade(&left, &c).unwrap().max_abs_diff(&c).unwrap() < 1e-15);
    }

    #[test]
    fn cascade_requires_matching_labels() {
        let c = sample();
        assert!(matches!(cascade(&c, &c), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn internal_choice_endpoints_pad_with_zero_columns() {
        let a = sample();
        let b = Channel::new(l(&["a", "b"]), l(&["z", "w"]), vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let zero = internal_choice(&a, &b, 0.0).unwrap();
        assert_eq!(zero.cols(), &l(&["x", "y", "z", "w"])[..]);
        assert_eq!(zero.row(0), &[0.2, 0.5, 0.3, 0.0]);
        let one = internal_choice(&a, &b, 1.0).unwrap();
        assert_eq!(one.row(0), &[0.0, 0.0, 0.5, 0.5]);
        let mid = internal_choice(&a, &b, 0.5).unwrap();
        assert!((mid.get(0, 2) - (0.5 * 0.3 + 0.5 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn choice_rejects_bad_probability() {
        let a = sample();
        assert!(matches!(internal_choice(&a, &a, 1.5), Err(Error::BadProbability(_))));
        assert!(matches!(external_choice(&a, &a, -0.1), Err(Error::BadProbability(_))));
    }

    #[test]
    fn external_choice_zero_keeps_first_block() {
        let a = sample();
        let e = external_choice(&a, &a, 0.0).unwrap();
        assert_eq!(e.n_cols(), 6);
        assert_eq!(&e.row(1)[..3], a.row(1));
        assert!(e.row(1)[3..].iter().all(|&v| v == 0.0));
        assert_eq!(e.cols()[0].as_str(), "1:x");
        assert_eq!(e.cols()[3].as_str(), "2:x");
    }

    #[test]
    fn parallel_with_identity_has_full_capacity() {
        let c = sample();
        let id = Channel::identity(c.rows().to_vec()).unwrap();
        let p = parallel(&id, &c).unwrap();
        assert!((bayes_capacity(&p) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kronecker_with_unit_identity() {
        let c = sample();
        let unit = Channel::identity(l(&["()"])).unwrap();
        let k = kronecker(&c, &unit).unwrap();
        assert_eq!(k.data(), c.data());
        assert_eq!(k.n_rows(), 2);
    }

    #[test]
    fn kronecker_entries() {
        let c = sample();
        let k = kronecker(&c, &c).unwrap();
        assert_eq!(k.n_rows(), 4);
        assert_eq!(k.n_cols(), 9);
        let r = k.row_index(&Label::new("b|a").unwrap()).unwrap();
        let col = k.col_index(&Label::new("x|y").unwrap()).unwrap();
        assert!((k.get(r, col) - 0.6 * 0.5).abs() < 1e-15);
    }
}
