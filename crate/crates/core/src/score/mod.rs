//! Thresholded six-way emotion prediction.
//!
//! A [`ScorerBackend`] maps normalized text to raw logits. Logits go through
//! a max-stabilized softmax; the top probability is the confidence, and the
//! arg-max emotion is only reported when the confidence reaches the
//! threshold. Anything below it is [`PredictedLabel::Ambiguous`] (`-1`).

mod backend;
#[cfg(feature = "interchange")]
mod interchange;
mod keywords;
mod records;

pub use backend::{BackendMetadata, ModelArtifact, ScorerBackend, ARTIFACT_FILES};
#[cfg(feature = "interchange")]
pub use interchange::InterchangeBackend;
pub use keywords::{lexicon_mock_backend, KeywordBackend, KeywordTable, HIT_LOGIT};
pub use records::{read_predictions, read_predictions_file, write_predictions, PredictionRecord, PREDICTION_HEADER};

use rayon::prelude::*;

use crate::corpus::LabeledExample;
use crate::error::{Error, Result};
use crate::label::{EmotionLabel, PredictedLabel, NUM_EMOTIONS};
use crate::normalize::NormalizedPost;
use crate::time::Timestamp;

/// Default minimum confidence for a concrete emotion.
pub const DEFAULT_THRESHOLD: f64 = 0.6;

/// Raw scores indexed by label code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmotionLogits([f64; NUM_EMOTIONS]);

impl EmotionLogits {
    pub fn new(values: [f64; NUM_EMOTIONS]) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLogit(i));
        }
        Ok(EmotionLogits(values))
    }

    pub fn values(&self) -> &[f64; NUM_EMOTIONS] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmotionProbabilities([f64; NUM_EMOTIONS]);

impl EmotionProbabilities {
    /// Wraps a vector that already sums to one (within 1e-9).
    pub fn new(values: [f64; NUM_EMOTIONS]) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        if values.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("not a probability vector: {values:?}")));
        }
        Ok(EmotionProbabilities(values))
    }

    pub fn values(&self) -> &[f64; NUM_EMOTIONS] {
        &self.0
    }

    /// Highest probability and its label; ties go to the lowest code.
    pub fn top(&self) -> (EmotionLabel, f64) {
        let mut best = 0;
        for i in 1..NUM_EMOTIONS {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        (EmotionLabel::ALL[best], self.0[best])
    }
}

pub fn softmax(logits: &EmotionLogits) -> EmotionProbabilities {
    let z = logits.values();
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p = z.map(|v| (v - max).exp());
    let sum: f64 = p.iter().sum();
    for v in &mut p {
        *v /= sum;
    }
    EmotionProbabilities(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: PredictedLabel,
    /// Top softmax probability, reported for ambiguous results too.
    pub confidence: f64,
}

/// How a probability vector becomes a label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecisionRule {
    /// Arg-max if the top probability is at least the threshold.
    Threshold(f64),
    /// Always the arg-max; used when evaluating against held-out labels.
    Argmax,
}

impl DecisionRule {
    pub fn threshold(t: f64) -> Result<Self> {
        if t > 0.0 && t <= 1.0 {
            Ok(DecisionRule::Threshold(t))
        } else {
            Err(Error::Validation(format!("threshold must lie in (0, 1], got {t}")))
        }
    }

    pub fn decide(&self, probs: &EmotionProbabilities) -> Prediction {
        let (label, confidence) = probs.top();
        let label = match *self {
            DecisionRule::Threshold(t) if confidence < t => PredictedLabel::Ambiguous,
            _ => PredictedLabel::Emotion(label),
        };
        Prediction { label, confidence }
    }
}

impl Default for DecisionRule {
    fn default() -> Self {
        DecisionRule::Threshold(DEFAULT_THRESHOLD)
    }
}

pub fn predict(text: &str, backend: &dyn ScorerBackend, threshold: f64) -> Result<Prediction> {
    let rule = DecisionRule::threshold(threshold)?;
    predict_with(text, backend, rule)
}

pub fn predict_with(text: &str, backend: &dyn ScorerBackend, rule: DecisionRule) -> Result<Prediction> {
    let logits = backend.logits(text)?;
    Ok(rule.decide(&softmax(&logits)))
}

/// Anything that can be scored: an id, optional timestamp and text.
pub trait Scorable {
    fn id(&self) -> &str;
    fn created_at(&self) -> Option<Timestamp>;
    fn text(&self) -> &str;
}

impl Scorable for NormalizedPost {
    fn id(&self) -> &str {
        &self.id
    }
    fn created_at(&self) -> Option<Timestamp> {
        Some(self.created_at)
    }
    fn text(&self) -> &str {
        &self.text
    }
}

impl Scorable for LabeledExample {
    fn id(&self) -> &str {
        &self.entry_id
    }
    fn created_at(&self) -> Option<Timestamp> {
        None
    }
    fn text(&self) -> &str {
        &self.text
    }
}

#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub records: Vec<PredictionRecord>,
    /// Posts skipped because the backend failed on them.
    pub failures: Vec<Error>,
}

/// Scores every item, fanning out across threads; results keep input
/// order. The first backend failure aborts the batch unless `skip_errors`.
pub fn batch_predict<T: Scorable + Sync>(
    items: &[T],
    backend: &dyn ScorerBackend,
    rule: DecisionRule,
    skip_errors: bool,
) -> Result<BatchOutcome> {
    let results: Vec<Result<PredictionRecord>> = items
        .par_iter()
        .map(|item| {
            predict_with(item.text(), backend, rule)
                .map(|prediction| PredictionRecord {
                    id: item.id().to_string(),
                    created_at: item.created_at(),
                    prediction,
                })
                .map_err(|e| e.with_post_id(item.id()))
        })
        .collect();
    let mut outcome = BatchOutcome::default();
    for r in results {
        match r {
            Ok(rec) => outcome.records.push(rec),
            Err(e) if skip_errors => outcome.failures.push(e),
            Err(e) => return Err(e),
        }
    }
    Ok(outcome)
}
