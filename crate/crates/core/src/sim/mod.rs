//! Seeded simulation of the browser algorithms.

mod cookies;
mod counting;
mod epochs;
mod rng;
mod sampling;

pub use cookies::{
    context_name, cookies_channel, linkage_channel, reconstruct_histories, simulate_cookie_session, user_name,
    write_cookie_log, CookieJar, CookieReport,
};
pub use counting::{
    fixed_truth_probability, run_counting_experiment, run_counting_experiment_with, Truth, DEFAULT_PARTITIONS,
};
pub use epochs::{multi_epoch_channels, EpochWorld};
pub use rng::SimRng;
pub use sampling::{
    estimate_channel, estimate_counting_channel, estimate_report_channel, sample_reported_index, sample_reported_topic,
    Estimate, SimReport,
};
