//! Quantitative information flow analysis of third-party cookies and the
//! Topics API.
//!
//! The crate is layered bottom-up:
//!
//! * [`qif`] is a labeled-channel calculus: priors, gain functions,
//!   vulnerabilities, leakages, capacities and the channel compositions.
//! * [`topics`] builds every channel of the cookies and Topics pipelines and
//!   provides the closed-form privacy and utility formulas.
//! * [`pipeline`] turns browsing-history and classification files into model
//!   inputs (top-s sets, taxonomies, priors).
//! * [`sim`] runs the browser algorithms as seeded stochastic processes.
//! * [`reports`] assembles tables and analysis reports for the CLI.

pub mod error;
pub mod pipeline;
pub mod qif;
pub mod reports;
pub mod sim;
pub mod topics;

pub use error::{Error, Result};
pub use qif::{Channel, GainMatrix, JointMatrix, Label, Prior};
pub use topics::{CountingParams, TopSet, TopicAssignment, TopicsParams};
