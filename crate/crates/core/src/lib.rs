//! Domain-shift emulation for multi-label clinical time series.
//!
//! The crate builds source/target evaluation pairs out of a single labeled
//! dataset. Positive classes are chosen from a *disease landscape*: a set of
//! discrete latent factors fit to the label matrix by an information sieve
//! (greedy layer-wise maximization of total correlation explained). Pairs are
//! then perturbed by measurement discrepancies and scored with
//! support-weighted average precision.
//!
//! Module map:
//!
//! * [`data`]: dataset model, JSON/JSONL and CSV ingestion, LOCF regularization.
//! * [`infotheory`]: plug-in entropy, mutual information and total correlation.
//! * [`sieve`]: layer fitting, remainder construction, landscapes and exports.
//! * [`scenarios`]: population splits, label-distribution shifts, balancing.
//! * [`transforms`]: label flips, sampling-rate change, channel masking.
//! * [`eval`]: precision-recall, average precision, baseline predictor, reports.
//! * [`synth`]: seeded synthetic generator with a planted factor structure.
//! * [`cli`]: the `clinshift` command-line surface.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod infotheory;
pub mod rng;
pub mod scenarios;
pub mod sieve;
pub mod synth;
pub mod transforms;

pub use error::{Error, Result};
