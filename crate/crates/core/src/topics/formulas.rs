//! Closed-form privacy results.

use super::types::{CookieWorld, TopicsParams};
use crate::error::{Error, Result};

/// Largest `n` for which `C(n, k)` is computed with exact integers.
const EXACT_BINOMIAL_MAX_N: u64 = 64;

/// `C(n, k)` as a float; exact below `n = 64`, `lgamma` above.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_BINOMIAL_MAX_N {
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * u128::from(n - i) / u128::from(i + 1);
        }
        acc as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let (n, k) = (n as f64, k as f64);
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// `sum_{h=2}^{c} C(c, h) = 2^c - c - 1`: the number of distinct histories
/// of at least two contexts.
fn multi_context_histories(c: usize) -> f64 {
    (2..=c as u64).map(|h| binomial(c as u64, h)).sum()
}

/// Posterior Bayes vulnerability of the cookies channel as printed,
/// `(1/N) sum_{h=2}^{c} C(c, h)`.
pub fn cookies_posterior_vulnerability(world: &CookieWorld) -> Result<f64> {
    world.validate()?;
    Ok(multi_context_histories(world.n_contexts) / world.n_users as f64)
}

/// Cookies leakage as printed, `sum_{h=2}^{c} C(c, h)`. This is the number
/// of possible histories and can exceed `N`; see [`cookies_capacity`].
pub fn cookies_leakage(world: &CookieWorld) -> Result<f64> {
    world.validate()?;
    Ok(multi_context_histories(world.n_contexts))
}

/// Leakage of the cookies channel over `N` users: `min{N, 2^c - c - 1}`.
pub fn cookies_capacity(world: &CookieWorld) -> Result<f64> {
    Ok(cookies_leakage(world)?.min(world.n_users as f64))
}

/// `(r + m'(1-r)/s, r + m(1-r)/s)`.
pub fn topics_leakage(params: &TopicsParams) -> Result<(f64, f64)> {
    let m_prime = params.m_prime().ok_or(Error::MissingMPrime)?;
    let term = |m: usize| params.r() + m as f64 * (1.0 - params.r()) / params.s() as f64;
    Ok((term(m_prime), term(params.m())))
}

/// `r + m(1-r)/s`, the Bayes capacity of the complete pipeline.
pub fn topics_capacity(params: &TopicsParams) -> f64 {
    params.r() + params.m() as f64 * (1.0 - params.r()) / params.s() as f64
}

/// `C(m, s)`, the bound on the number of distinct top-sets.
pub fn generalization_bound(params: &TopicsParams) -> f64 {
    binomial(params.m() as u64, params.s() as u64)
}

/// `(m'/s, m/s)`.
pub fn bounded_noise_leakage(params: &TopicsParams) -> Result<(f64, f64)> {
    let m_prime = params.m_prime().ok_or(Error::MissingMPrime)?;
    let s = params.s() as f64;
    Ok((m_prime as f64 / s, params.m() as f64 / s))
}

/// `1 + m(1-r)/(r s)`.
pub fn topics_maxcase_capacity(params: &TopicsParams) -> Result<f64> {
    if params.r() <= 0.0 {
        return Err(Error::ZeroR);
    }
    Ok(1.0 + params.m() as f64 * (1.0 - params.r()) / (params.r() * params.s() as f64))
}

/// `ln(1 + m(1-r)/(r s))`.
pub fn topics_epsilon(params: &TopicsParams) -> Result<f64> {
    topics_maxcase_capacity(params).map(f64::ln)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, s: usize, r: f64) -> TopicsParams {
        TopicsParams::new(m, s, r).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(5, 5), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(64, 32), 1832624140942590534.0);
        let big = binomial(1679, 5);
        let exact = 1679.0 * 1678.0 * 1677.0 * 1676.0 * 1675.0 / 120.0;
        assert!((big / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cookies_three_user_world() {
        let w = CookieWorld::uniform(3, 5).unwrap();
        assert!((cookies_posterior_vulnerability(&w).unwrap() - 26.0 / 3.0).abs() < 1e-12);
        assert_eq!(cookies_leakage(&w).unwrap(), 26.0);
        assert_eq!(cookies_capacity(&w).unwrap(), 3.0);
        assert_eq!(cookies_leakage(&CookieWorld::uniform(1, 2).unwrap()).unwrap(), 1.0);
        assert_eq!(cookies_capacity(&CookieWorld::uniform(10, 4).unwrap()).unwrap(), 10.0);
        assert!(matches!(
            cookies_leakage(&CookieWorld { n_users: 1, n_contexts: 1, history_sizes: vec![] }),
            Err(Error::BadWorld(_))
        ));
    }

    #[test]
    fn topics_leakage_pairs() {
        let (l, b) = topics_leakage(&params(5, 2, 0.05).with_m_prime(4).unwrap()).unwrap();
        assert!((l - 1.95).abs() < 1e-12);
        assert!((b - 2.425).abs() < 1e-12);
        let (l, b) = topics_leakage(&params(31, 5, 0.05).with_m_prime(31).unwrap()).unwrap();
        assert_eq!(l, b);
        assert!((l - 5.94).abs() < 1e-12);
        assert!(matches!(topics_leakage(&params(5, 2, 0.05)), Err(Error::MissingMPrime)));
    }

    #[test]
    fn generalization_and_bounded_noise() {
        assert_eq!(generalization_bound(&params(4, 2, 0.05)), 6.0);
        assert_eq!(generalization_bound(&params(3, 3, 0.05)), 1.0);
        let (l, b) = bounded_noise_leakage(&params(4, 2, 0.05).with_m_prime(3).unwrap()).unwrap();
        assert_eq!((l, b), (1.5, 2.0));
    }

    #[test]
    fn epsilon_and_maxcase() {
        let p = params(4, 2, 0.05);
        assert!((topics_maxcase_capacity(&p).unwrap() - 39.0).abs() < 1e-12);
        assert!((topics_epsilon(&p).unwrap() - 3.6635616461296463).abs() < 1e-12);
        assert!(matches!(topics_epsilon(&params(4, 2, 0.0)), Err(Error::ZeroR)));
        let q = params(629, 5, 0.47);
        assert!((topics_epsilon(&q).unwrap().exp() - topics_maxcase_capacity(&q).unwrap()).abs() < 1e-9);
    }
}
