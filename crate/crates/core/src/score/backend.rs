use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::EmotionLogits;
use crate::error::{Error, Result};
use crate::label::EmotionLabel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendMetadata {
    pub name: String,
    pub version: String,
}

/// Maps normalized text to six logits. Implementations must be
/// deterministic for a fixed model and input, and shareable across threads.
pub trait ScorerBackend: Send + Sync {
    fn metadata(&self) -> &BackendMetadata;
    fn logits(&self, text: &str) -> Result<EmotionLogits>;
}

/// Files every exported model directory must contain.
pub const ARTIFACT_FILES: [&str; 4] = ["model.onnx", "tokenizer.json", "label_map.json", "metadata.json"];

#[derive(Debug, Clone, Deserialize)]
struct RawMetadata {
    name: Option<String>,
    version: Option<String>,
    base_model: Option<String>,
    max_length: Option<usize>,
}

/// A validated model directory as exported by the trainer.
#[derive(Debug, Clone)]
pub struct ModelArtifact {
    pub dir: PathBuf,
    pub metadata: BackendMetadata,
    pub base_model: Option<String>,
    /// Tokens per input after truncation/padding.
    pub max_length: usize,
}

impl ModelArtifact {
    pub const DEFAULT_MAX_LENGTH: usize = 128;

    /// Checks that all files exist and that the label map is exactly the
    /// Happy=0 … Anger=5 code table.
    pub fn open(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            return Err(Error::Validation(format!("model directory {} does not exist", dir.display())));
        }
        for f in ARTIFACT_FILES {
            if !dir.join(f).is_file() {
                return Err(Error::format(dir, format!("model artifact is missing {f}")));
            }
        }
        let read = |name: &str| {
            let p = dir.join(name);
            fs::read_to_string(&p).map_err(|e| Error::io(&p, e))
        };

        let label_map: BTreeMap<String, i64> = serde_json::from_str(&read("label_map.json")?)
            .map_err(|e| Error::format(dir.join("label_map.json"), e.to_string()))?;
        check_label_map(&label_map).map_err(|m| Error::format(dir.join("label_map.json"), m))?;

        let raw: RawMetadata = serde_json::from_str(&read("metadata.json")?)
            .map_err(|e| Error::format(dir.join("metadata.json"), e.to_string()))?;
        let max_length = raw.max_length.unwrap_or(Self::DEFAULT_MAX_LENGTH);
        if max_length < 2 {
            return Err(Error::format(dir.join("metadata.json"), "max_length must be at least 2"));
        }
        Ok(ModelArtifact {
            dir: dir.to_path_buf(),
            metadata: BackendMetadata {
                name: raw.name.unwrap_or_else(|| "interchange".into()),
                version: raw.version.unwrap_or_else(|| "unversioned".into()),
            },
            base_model: raw.base_model,
            max_length,
        })
    }

    pub fn model_path(&self) -> PathBuf {
        self.dir.join(ARTIFACT_FILES[0])
    }

    pub fn tokenizer_path(&self) -> PathBuf {
        self.dir.join(ARTIFACT_FILES[1])
    }
}

fn check_label_map(map: &BTreeMap<String, i64>) -> std::result::Result<(), String> {
    if map.len() != EmotionLabel::ALL.len() {
        return Err(format!("expected 6 labels, found {}", map.len()));
    }
    for label in EmotionLabel::ALL {
        match map.get(label.name()) {
            Some(&id) if id == label.code() as i64 => {}
            Some(&id) => return Err(format!("{} mapped to {id}, expected {}", label.name(), label.code())),
            None => return Err(format!("label {} missing", label.name())),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tiny_artifact")
    }

    fn copy_fixture(to: &Path) {
        for f in ARTIFACT_FILES {
            fs::copy(fixture().join(f), to.join(f)).unwrap();
        }
    }

    #[test]
    fn opens_fixture() {
        let a = ModelArtifact::open(&fixture()).unwrap();
        assert_eq!(a.max_length, 16);
        assert_eq!(a.metadata.name, "tiny-bag-of-embeddings");
    }

    #[test]
    fn missing_tokenizer_rejected() {
        let dir = tempfile::tempdir().unwrap();
        copy_fixture(dir.path());
        fs::remove_file(dir.path().join("tokenizer.json")).unwrap();
        let err = ModelArtifact::open(dir.path()).unwrap_err();
        assert!(err.to_string().contains("tokenizer.json"));
    }

    #[test]
    fn permuted_label_map_rejected() {
        let dir = tempfile::tempdir().unwrap();
        copy_fixture(dir.path());
        fs::write(
            dir.path().join("label_map.json"),
            r#"{"Happy":0,"Fear":2,"Sadness":1,"Disgust":3,"Surprise":4,"Anger":5}"#,
        )
        .unwrap();
        assert!(ModelArtifact::open(dir.path()).is_err());
        fs::write(dir.path().join("label_map.json"), r#"{"Happy":0}"#).unwrap();
        assert!(ModelArtifact::open(dir.path()).is_err());
    }

    #[test]
    fn nonexistent_dir_is_validation_error() {
        let err = ModelArtifact::open(Path::new("/nonexistent/model")).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Validation);
    }
}
