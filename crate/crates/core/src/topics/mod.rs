//! Channels, closed-form leakages and utility measures for third-party
//! cookies and the Topics API.

mod channels;
mod formulas;
mod table;
mod types;
mod utility;

pub use channels::{
    bounded_noise_channel, deterministic_channel, dp_channel, drop_empty_columns, generalization_channel,
    identity_channel, k_anonymity_of, noise_bound_of, topics_report_channel, TopicsChannels,
};
pub use formulas::{
    binomial, bounded_noise_leakage, cookies_capacity, cookies_leakage, cookies_posterior_vulnerability,
    generalization_bound, ln_binomial, topics_capacity, topics_epsilon, topics_leakage, topics_maxcase_capacity,
};
pub use table::{dataset_presets, taxonomy_presets, theory_row, theory_table, tradeoff_presets, TheoryRow};
pub use types::{CookieWorld, CountingParams, RandomizedResponse, TopSet, TopicAssignment, TopicsParams};
pub use utility::{
    counting_channel, counting_exact_probability, counting_params, counting_power_approximation, iba_gain,
    iba_posterior_bounds,
};
