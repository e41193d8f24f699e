//! Keyword-count scorer, a deterministic stand-in for a trained model.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::backend::{BackendMetadata, ScorerBackend};
use super::EmotionLogits;
use crate::error::{Error, Result};
use crate::label::{EmotionLabel, NUM_EMOTIONS};
use crate::normalize::turkish_lowercase;

const BUNDLED: &str = include_str!("../../data/mock_keywords.json");

/// Keyword stems per emotion, stored lowercase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordTable {
    stems: [Vec<String>; NUM_EMOTIONS],
}

impl KeywordTable {
    /// Every one of the six emotions must be present with at least one
    /// non-empty stem. Keys are emotion names in any case.
    pub fn new(map: BTreeMap<String, Vec<String>>) -> Result<Self> {
        let mut stems: [Vec<String>; NUM_EMOTIONS] = Default::default();
        let mut seen = [false; NUM_EMOTIONS];
        for (key, words) in map {
            let label: EmotionLabel = key.parse()?;
            seen[label.index()] = true;
            stems[label.index()] = words
                .iter()
                .map(|w| turkish_lowercase(w.trim()))
                .filter(|w| !w.is_empty())
                .collect();
        }
        for label in EmotionLabel::ALL {
            if !seen[label.index()] || stems[label.index()].is_empty() {
                return Err(Error::Validation(format!("keyword table has no entries for {label}")));
            }
        }
        Ok(KeywordTable { stems })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let map: BTreeMap<String, Vec<String>> =
            serde_json::from_str(json).map_err(|e| Error::Validation(format!("keyword table: {e}")))?;
        Self::new(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json).map_err(|e| Error::format(path, e.to_string()))
    }

    /// Small Turkish table shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled keyword table is valid")
    }

    pub fn stems(&self, label: EmotionLabel) -> &[String] {
        &self.stems[label.index()]
    }

    /// Per-emotion count of words starting with one of that emotion's stems.
    pub fn hit_counts(&self, text: &str) -> [u32; NUM_EMOTIONS] {
        let lowered = turkish_lowercase(text);
        let mut counts = [0u32; NUM_EMOTIONS];
        for word in lowered.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
            for (count, stems) in counts.iter_mut().zip(&self.stems) {
                if stems.iter().any(|s| word.starts_with(s.as_str())) {
                    *count += 1;
                }
            }
        }
        counts
    }
}

/// Each keyword hit adds [`HIT_LOGIT`] to its emotion's logit, so a single
/// unopposed hit clears the default threshold. No hits, or a tie for the top
/// count, gives all-zero logits (uniform, so always ambiguous under a threshold).
pub const HIT_LOGIT: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct KeywordBackend {
    table: KeywordTable,
    metadata: BackendMetadata,
}

impl KeywordBackend {
    pub fn new(table: KeywordTable) -> Self {
        KeywordBackend {
            table,
            metadata: BackendMetadata {
                name: "lexicon-mock".into(),
                version: "1".into(),
            },
        }
    }

    pub fn table(&self) -> &KeywordTable {
        &self.table
    }
}

impl ScorerBackend for KeywordBackend {
    fn metadata(&self) -> &BackendMetadata {
        &self.metadata
    }

    fn logits(&self, text: &str) -> Result<EmotionLogits> {
        let counts = self.table.hit_counts(text);
        let max = *counts.iter().max().unwrap();
        let leaders = counts.iter().filter(|&&c| c == max).count();
        if max == 0 || leaders > 1 {
            return EmotionLogits::new([0.0; NUM_EMOTIONS]);
        }
        EmotionLogits::new(counts.map(|c| HIT_LOGIT * f64::from(c)))
    }
}

pub fn lexicon_mock_backend(keyword_table: BTreeMap<String, Vec<String>>) -> Result<KeywordBackend> {
    KeywordTable::new(keyword_table).map(KeywordBackend::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::PredictedLabel;
    use crate::score::{predict, softmax};

    fn table() -> BTreeMap<String, Vec<String>> {
        [
            ("Happy", "mutlu"),
            ("Fear", "kork"),
            ("Sadness", "üzgün"),
            ("Disgust", "iğrenç"),
            ("Surprise", "şaşır"),
            ("Anger", "öfke"),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), vec![v.to_string()]))
        .collect()
    }

    #[test]
    fn repeated_happy_keyword() {
        let b = lexicon_mock_backend(table()).unwrap();
        let z = b.logits("mutlu mutlu MUTLU bir gün").unwrap();
        assert_eq!(softmax(&z).top().0, EmotionLabel::Happy);
        assert_eq!(predict("mutlu mutlu mutlu", &b, 0.6).unwrap().label, PredictedLabel::Emotion(EmotionLabel::Happy));
    }

    #[test]
    fn no_keywords_is_ambiguous() {
        let b = lexicon_mock_backend(table()).unwrap();
        assert_eq!(b.logits("merhaba dünya").unwrap().values(), &[0.0; 6]);
        assert_eq!(predict("merhaba dünya", &b, 0.6).unwrap().label, PredictedLabel::Ambiguous);
    }

    #[test]
    fn count_oracle() {
        let b = lexicon_mock_backend(table()).unwrap();
        let text = "öfkeliyim, çok öfke var ama biraz korku da";
        // hand tally: öfkeliyim, öfke -> anger 2; korku -> fear 1
        let expected = [0.0, 3.0, 0.0, 0.0, 0.0, 6.0];
        assert_eq!(b.logits(text).unwrap().values(), &expected);
        assert_eq!(softmax(&b.logits(text).unwrap()).top().0, EmotionLabel::Anger);
    }

    #[test]
    fn one_hit_clears_threshold() {
        let b = lexicon_mock_backend(table()).unwrap();
        let p = predict("bugün mutluyum", &b, 0.6).unwrap();
        // e^3 / (e^3 + 5)
        assert!((p.confidence - 0.800_681_962_068_020_2).abs() < 1e-12);
        assert_eq!(p.label, PredictedLabel::Emotion(EmotionLabel::Happy));
    }

    #[test]
    fn ties_are_uniform() {
        let b = lexicon_mock_backend(table()).unwrap();
        assert_eq!(b.logits("mutlu ama korkuyorum").unwrap().values(), &[0.0; 6]);
    }

    #[test]
    fn incomplete_table_rejected() {
        let mut t = table();
        t.remove("Anger");
        assert!(lexicon_mock_backend(t).is_err());
        let mut t = table();
        t.insert("Anger".into(), vec![" ".into()]);
        assert!(lexicon_mock_backend(t).is_err());
        let mut t = table();
        t.insert("Joy".into(), vec!["x".into()]);
        assert!(lexicon_mock_backend(t).is_err());
    }

    #[test]
    fn bundled_table_loads() {
        let t = KeywordTable::bundled();
        assert!(t.stems(EmotionLabel::Anger).contains(&"öfke".to_string()));
    }
}
