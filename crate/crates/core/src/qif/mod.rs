//! Labeled-channel calculus.
//!
//! Channels are row-stochastic matrices whose rows (secrets) and columns
//! (observables) carry text labels. All values are immutable once built and
//! every operation is a pure function, so they can be shared freely across
//! threads.

mod channel;
mod compose;
mod gain;
pub mod io;
mod label;
mod measures;
mod prior;

use std::sync::atomic::{AtomicUsize, Ordering};

pub use channel::{Channel, JointMatrix};
pub use compose::{cascade, external_choice, internal_choice, kronecker, parallel};
pub use gain::GainMatrix;
pub(crate) use label::ensure_unique as ensure_unique_labels;
pub use label::Label;
pub use measures::{
    bayes_capacity, best_posterior_actions, best_prior_action, dalenius_leakage, epsilon_of, maxcase_capacity,
    multiplicative_leakage, posterior_bayes_vulnerability, posterior_g_vulnerability, prior_bayes_vulnerability,
    prior_g_vulnerability,
};
pub use prior::{uniform_prior, Prior};

use crate::error::{Error, Result};

/// Absolute tolerance for stochasticity and equality checks.
pub const TOLERANCE: f64 = 1e-9;

/// Default upper bound on the number of entries of any matrix.
pub const DEFAULT_ENTRY_CAP: usize = 100_000_000;

static ENTRY_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ENTRY_CAP);

/// Current cap on `rows * cols` for any matrix built by this module.
pub fn entry_cap() -> usize {
    ENTRY_CAP.load(Ordering::Relaxed)
}

/// Changes the process-wide entry cap. Returns the previous value.
pub fn set_entry_cap(cap: usize) -> usize {
    ENTRY_CAP.swap(cap, Ordering::Relaxed)
}

pub(crate) fn ensure_within_cap(rows: usize, cols: usize) -> Result<()> {
    check_cap(rows, cols, entry_cap())
}

fn check_cap(rows: usize, cols: usize, cap: usize) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(n) if n <= cap => Ok(()),
        _ => Err(Error::TooLarge { rows, cols, cap }),
    }
}

pub(crate) fn ensure_same_labels(a: &[Label], b: &[Label], what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LabelMismatch(what.to_string()))
    }
}
