//! Turkish social-media emotion analysis.
//!
//! The crate covers the batch side of the workflow: loading tweet-like
//! corpora, rule-based normalization with Turkish emoji translation,
//! preparing a balanced labeled corpus, thresholded six-emotion scoring
//! through a pluggable backend, confusion-matrix evaluation, and temporal
//! aggregation into distribution tables and emotion series.

pub mod aggregate;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod label;
pub mod normalize;
pub mod pipeline;
pub mod report;
pub mod score;
pub mod time;

pub use error::{Error, ErrorKind, Result};
pub use label::{EmotionLabel, PredictedLabel};
pub use time::{TimeWindow, Timestamp};
