//! Scorer over an exported ONNX sequence classifier and its tokenizer.

use tokenizers::{PaddingParams, PaddingStrategy, Tokenizer, TruncationParams};
use tract_onnx::prelude::*;

use super::backend::{BackendMetadata, ModelArtifact, ScorerBackend};
use super::EmotionLogits;
use crate::error::{Error, Result};
use crate::label::NUM_EMOTIONS;

#[derive(Debug, Clone, Copy)]
enum InputKind {
    Ids,
    Mask,
    TypeIds,
}

pub struct InterchangeBackend {
    metadata: BackendMetadata,
    tokenizer: Tokenizer,
    plan: TypedSimplePlan<TypedModel>,
    inputs: Vec<InputKind>,
    max_length: usize,
}

impl InterchangeBackend {
    pub fn load(artifact: &ModelArtifact) -> Result<Self> {
        let max_length = artifact.max_length;
        let mut tokenizer = Tokenizer::from_file(artifact.tokenizer_path())
            .map_err(|e| Error::backend(format!("cannot load tokenizer: {e}")))?;
        let pad_id = tokenizer.token_to_id("[PAD]").unwrap_or(0);
        tokenizer
            .with_truncation(Some(TruncationParams {
                max_length,
                ..Default::default()
            }))
            .map_err(|e| Error::backend(format!("tokenizer truncation: {e}")))?;
        tokenizer.with_padding(Some(PaddingParams {
            strategy: PaddingStrategy::Fixed(max_length),
            pad_id,
            pad_token: "[PAD]".into(),
            ..Default::default()
        }));

        let backend_err = |e: TractError| Error::backend(format!("cannot load {}: {e}", artifact.model_path().display()));
        let mut model = tract_onnx::onnx().model_for_path(artifact.model_path()).map_err(backend_err)?;
        let mut inputs = Vec::new();
        for (i, outlet) in model.input_outlets().map_err(backend_err)?.to_vec().into_iter().enumerate() {
            let name = model.node(outlet.node).name.clone();
            let kind = match name.as_str() {
                "input_ids" => InputKind::Ids,
                "attention_mask" => InputKind::Mask,
                "token_type_ids" => InputKind::TypeIds,
                other => return Err(Error::backend(format!("unsupported model input {other:?}"))),
            };
            inputs.push(kind);
            model
                .set_input_fact(i, InferenceFact::dt_shape(i64::datum_type(), tvec!(1, max_length)))
                .map_err(backend_err)?;
        }
        let plan = model
            .into_optimized()
            .and_then(|m| m.into_runnable())
            .map_err(backend_err)?;
        Ok(InterchangeBackend {
            metadata: artifact.metadata.clone(),
            tokenizer,
            plan,
            inputs,
            max_length,
        })
    }
}

impl ScorerBackend for InterchangeBackend {
    fn metadata(&self) -> &BackendMetadata {
        &self.metadata
    }

    fn logits(&self, text: &str) -> Result<EmotionLogits> {
        let enc = self
            .tokenizer
            .encode(text, true)
            .map_err(|e| Error::backend(format!("tokenization failed: {e}")))?;
        let column = |xs: &[u32]| -> Result<TValue> {
            let data: Vec<i64> = xs.iter().map(|&x| x as i64).collect();
            tract_ndarray::Array2::from_shape_vec((1, self.max_length), data)
                .map(|a| Tensor::from(a).into())
                .map_err(|e| Error::backend(format!("bad encoding length: {e}")))
        };
        let mut values = TVec::new();
        for kind in &self.inputs {
            values.push(match kind {
                InputKind::Ids => column(enc.get_ids())?,
                InputKind::Mask => column(enc.get_attention_mask())?,
                InputKind::TypeIds => column(enc.get_type_ids())?,
            });
        }
        let outputs = self
            .plan
            .run(values)
            .map_err(|e| Error::backend(format!("inference failed: {e}")))?;
        let view = outputs[0]
            .to_array_view::<f32>()
            .map_err(|e| Error::backend(format!("unexpected output type: {e}")))?;
        let flat: Vec<f64> = view.iter().map(|&v| v as f64).collect();
        let logits: [f64; NUM_EMOTIONS] = flat
            .try_into()
            .map_err(|v: Vec<f64>| Error::backend(format!("model produced {} logits, expected 6", v.len())))?;
        EmotionLogits::new(logits)
    }
}
