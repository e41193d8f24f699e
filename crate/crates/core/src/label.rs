//! The six-way emotion label space and the ambiguity sentinel.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of emotion classes.
pub const NUM_EMOTIONS: usize = 6;

/// Integer code of an ambiguous (below-threshold) prediction.
pub const AMBIGUOUS_CODE: i8 = -1;

/// Ekman's basic emotions with their fixed integer codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum EmotionLabel {
    Happy = 0,
    Fear = 1,
    Sadness = 2,
    Disgust = 3,
    Surprise = 4,
    Anger = 5,
}

impl EmotionLabel {
    /// All labels in code order.
    pub const ALL: [EmotionLabel; NUM_EMOTIONS] = [
        EmotionLabel::Happy,
        EmotionLabel::Fear,
        EmotionLabel::Sadness,
        EmotionLabel::Disgust,
        EmotionLabel::Surprise,
        EmotionLabel::Anger,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_code(code: i64) -> Result<Self> {
        usize::try_from(code)
            .ok()
            .and_then(|i| Self::ALL.get(i).copied())
            .ok_or(Error::UnknownLabelId(code))
    }

    /// Capitalized name as used in labeled corpora ("Happy").
    pub fn name(self) -> &'static str {
        match self {
            EmotionLabel::Happy => "Happy",
            EmotionLabel::Fear => "Fear",
            EmotionLabel::Sadness => "Sadness",
            EmotionLabel::Disgust => "Disgust",
            EmotionLabel::Surprise => "Surprise",
            EmotionLabel::Anger => "Anger",
        }
    }

    /// Lowercase name used in CSV headers and prediction files.
    pub fn key(self) -> &'static str {
        match self {
            EmotionLabel::Happy => "happy",
            EmotionLabel::Fear => "fear",
            EmotionLabel::Sadness => "sadness",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::Surprise => "surprise",
            EmotionLabel::Anger => "anger",
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmotionLabel {
    type Err = Error;

    /// Accepts a name in any ASCII case, or the integer code.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(code) = s.parse::<i64>() {
            return Self::from_code(code);
        }
        Self::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// A classifier decision: one of the six emotions or the ambiguity sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictedLabel {
    Emotion(EmotionLabel),
    Ambiguous,
}

impl PredictedLabel {
    pub fn code(self) -> i8 {
        match self {
            PredictedLabel::Emotion(l) => l.code() as i8,
            PredictedLabel::Ambiguous => AMBIGUOUS_CODE,
        }
    }

    pub fn from_code(code: i64) -> Result<Self> {
        if code == AMBIGUOUS_CODE as i64 {
            Ok(PredictedLabel::Ambiguous)
        } else {
            EmotionLabel::from_code(code).map(PredictedLabel::Emotion)
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            PredictedLabel::Emotion(l) => l.key(),
            PredictedLabel::Ambiguous => "ambiguous",
        }
    }

    pub fn emotion(self) -> Option<EmotionLabel> {
        match self {
            PredictedLabel::Emotion(l) => Some(l),
            PredictedLabel::Ambiguous => None,
        }
    }
}

impl From<EmotionLabel> for PredictedLabel {
    fn from(l: EmotionLabel) -> Self {
        PredictedLabel::Emotion(l)
    }
}

/// Encodes an emotion name to its integer code. `Ambiguous` is not encodable.
pub fn label_to_id(name: &str) -> Result<u8> {
    EmotionLabel::ALL
        .into_iter()
        .find(|l| l.name().eq_ignore_ascii_case(name.trim()))
        .map(EmotionLabel::code)
        .ok_or_else(|| Error::UnknownLabel(name.to_string()))
}

/// Decodes an integer code to its name; `-1` decodes to `Ambiguous`.
pub fn id_to_label(id: i64) -> Result<&'static str> {
    match PredictedLabel::from_code(id)? {
        PredictedLabel::Emotion(l) => Ok(l.name()),
        PredictedLabel::Ambiguous => Ok("Ambiguous"),
    }
}
