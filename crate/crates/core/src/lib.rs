//! Predict discrete survey-response distributions from quotation corpora.
//!
//! The pipeline runs in five stages: keyword filtering of a JSONL quote
//! corpus, per-quote sentiment scoring, removal of statistically biased
//! media outlets, speaker-nationality attribution, and KNN regression over
//! per-(country, year) sentiment histograms with KL divergence as the
//! distance. Two cross-validation protocols (leave-one-country-out and
//! same-country-validation) evaluate predictions against survey ground
//! truth.

pub mod bias;
pub mod corpus;
pub mod country;
pub mod demography;
pub mod distribution;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod knn;
pub mod sentiment;
pub mod stats;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
