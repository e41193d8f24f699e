//! Confusion matrix and accuracy / precision / recall / F1.
//!
//! Rows are the true label, columns the predicted label, both in label-code
//! order. Zero denominators give a metric of 0 with a flag set, never NaN.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::corpus::LabeledExample;
use crate::error::{Error, Result};
use crate::label::{EmotionLabel, PredictedLabel, NUM_EMOTIONS};
use crate::score::PredictionRecord;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    counts: [[u64; NUM_EMOTIONS]; NUM_EMOTIONS],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; NUM_EMOTIONS]; NUM_EMOTIONS]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn counts(&self) -> &[[u64; NUM_EMOTIONS]; NUM_EMOTIONS] {
        &self.counts
    }

    pub fn get(&self, truth: EmotionLabel, pred: EmotionLabel) -> u64 {
        self.counts[truth.index()][pred.index()]
    }

    pub fn add(&mut self, truth: EmotionLabel, pred: EmotionLabel) {
        self.counts[truth.index()][pred.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_EMOTIONS).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, truth: EmotionLabel) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    pub fn column_sum(&self, pred: EmotionLabel) -> u64 {
        self.counts.iter().map(|row| row[pred.index()]).sum()
    }

    pub fn accuracy(&self) -> Result<f64> {
        match self.total() {
            0 => Err(Error::Empty("confusion matrix has no entries".into())),
            total => Ok(self.trace() as f64 / total as f64),
        }
    }

    pub fn class_metrics(&self) -> Result<[ClassMetrics; NUM_EMOTIONS]> {
        if self.total() == 0 {
            return Err(Error::Empty("confusion matrix has no entries".into()));
        }
        Ok(EmotionLabel::ALL.map(|label| {
            let tp = self.get(label, label) as f64;
            let ratio = |den: u64| if den == 0 { (0.0, true) } else { (tp / den as f64, false) };
            let (precision, precision_undefined) = ratio(self.column_sum(label));
            let (recall, recall_undefined) = ratio(self.row_sum(label));
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                label,
                precision,
                recall,
                f1,
                support: self.row_sum(label),
                precision_undefined,
                recall_undefined,
            }
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub label: EmotionLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of true instances of the class.
    pub support: u64,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
}

/// Tallies (truth, prediction) pairs. Both sides must be concrete emotions.
pub fn confusion(truths: &[PredictedLabel], preds: &[PredictedLabel]) -> Result<ConfusionMatrix> {
    if truths.len() != preds.len() {
        return Err(Error::LengthMismatch {
            truths: truths.len(),
            preds: preds.len(),
        });
    }
    let mut m = ConfusionMatrix::default();
    for (i, (t, p)) in truths.iter().zip(preds).enumerate() {
        let t = t.emotion().ok_or_else(|| Error::AmbiguousLabel(format!("truth #{i}")))?;
        let p = p.emotion().ok_or_else(|| Error::AmbiguousLabel(format!("prediction #{i}")))?;
        m.add(t, p);
    }
    Ok(m)
}

/// Pairs held-out examples with predictions by id, in example order.
pub fn align(truth: &[LabeledExample], preds: &[PredictionRecord]) -> Result<(Vec<PredictedLabel>, Vec<PredictedLabel>)> {
    let by_id: HashMap<&str, PredictedLabel> = preds.iter().map(|r| (r.id.as_str(), r.prediction.label)).collect();
    let mut t = Vec::with_capacity(truth.len());
    let mut p = Vec::with_capacity(truth.len());
    for ex in truth {
        let pred = by_id
            .get(ex.entry_id.as_str())
            .ok_or_else(|| Error::Validation(format!("no prediction for example {:?}", ex.entry_id)))?;
        t.push(PredictedLabel::Emotion(ex.emotion));
        p.push(*pred);
    }
    Ok((t, p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub matrix: ConfusionMatrix,
    pub accuracy: f64,
    pub classes: [ClassMetrics; NUM_EMOTIONS],
}

pub fn report(matrix: &ConfusionMatrix) -> Result<EvalReport> {
    Ok(EvalReport {
        accuracy: matrix.accuracy()?,
        classes: matrix.class_metrics()?,
        matrix: matrix.clone(),
    })
}

impl EvalReport {
    /// `emotion,precision,recall,f1,support` rows, then an accuracy row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("emotion,precision,recall,f1,support\n");
        for c in &self.classes {
            writeln!(s, "{},{:.4},{:.4},{:.4},{}", c.label.key(), c.precision, c.recall, c.f1, c.support).unwrap();
        }
        writeln!(s, "accuracy,{:.4},,,{}", self.accuracy, self.matrix.total()).unwrap();
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        writeln!(s, "  \"accuracy\": {:.4},", self.accuracy).unwrap();
        writeln!(s, "  \"total\": {},", self.matrix.total()).unwrap();
        s.push_str("  \"classes\": [\n");
        for (i, c) in self.classes.iter().enumerate() {
            write!(
                s,
                "    {{\"emotion\": \"{}\", \"precision\": {:.4}, \"recall\": {:.4}, \"f1\": {:.4}, \"support\": {}, \"precision_undefined\": {}, \"recall_undefined\": {}}}",
                c.label.key(),
                c.precision,
                c.recall,
                c.f1,
                c.support,
                c.precision_undefined,
                c.recall_undefined
            )
            .unwrap();
            s.push_str(if i + 1 < NUM_EMOTIONS { ",\n" } else { "\n" });
        }
        s.push_str("  ],\n  \"confusion\": [\n");
        for (i, row) in self.matrix.counts().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            write!(s, "    [{}]", cells.join(", ")).unwrap();
            s.push_str(if i + 1 < NUM_EMOTIONS { ",\n" } else { "\n" });
        }
        s.push_str("  ]\n}\n");
        s
    }
}
