//! One masked variant of a sentence per noun or verb occurrence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nlp::{AnnotatedDocument, PosTag, WordClass};

pub const DEFAULT_MASK_TOKEN: &str = "[MASK]";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MaskError {
    #[error("sentence {sentence_index}: `{expected}` is not at bytes {start}..{end}")]
    SurfaceMismatch {
        sentence_index: usize,
        expected: String,
        start: usize,
        end: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedInstance {
    pub doc_id: String,
    pub sentence_index: usize,
    pub token_index: usize,
    pub masked_surface: String,
    pub masked_pos: WordClass,
    pub masked_tag: PosTag,
    pub sentence_text: String,
    /// Byte range of the masked word within `sentence_text`.
    pub start: usize,
    pub end: usize,
    /// `sentence_text` with the default mask token in place of the word.
    pub rendered: String,
}

impl MaskedInstance {
    /// Puts the original word back into `rendered`.
    pub fn unmask(&self, rendered: &str, mask_token: &str) -> String {
        rendered.replacen(mask_token, &self.masked_surface, 1)
    }
}

/// Nouns (NN, NNS, NNP, NNPS) and verbs (VB*) in document order. Modals are
/// never masked; repeated words are masked once per occurrence.
pub fn generate_masked_instances(doc: &AnnotatedDocument) -> Vec<MaskedInstance> {
    let mut out = Vec::new();
    for sentence in &doc.sentences {
        for (i, token) in sentence.tokens.iter().enumerate() {
            let Some(class) = token.pos.word_class() else {
                continue;
            };
            let range = sentence.local_range(i);
            let mut rendered = sentence.text.clone();
            rendered.replace_range(range.clone(), DEFAULT_MASK_TOKEN);
            out.push(MaskedInstance {
                doc_id: doc.doc_id.clone(),
                sentence_index: sentence.index,
                token_index: i,
                masked_surface: token.surface.clone(),
                masked_pos: class,
                masked_tag: token.pos,
                sentence_text: sentence.text.clone(),
                start: range.start,
                end: range.end,
                rendered,
            });
        }
    }
    out
}

/// The sentence with the masked word replaced by `mask_token`. Framing tokens
/// such as `[CLS]`/`[SEP]` are left to the model provider.
pub fn render_for_model(instance: &MaskedInstance, mask_token: &str) -> Result<String, MaskError> {
    let text = &instance.sentence_text;
    match text.get(instance.start..instance.end) {
        Some(s) if s == instance.masked_surface => {
            let mut out = String::with_capacity(text.len() + mask_token.len());
            out.push_str(&text[..instance.start]);
            out.push_str(mask_token);
            out.push_str(&text[instance.end..]);
            Ok(out)
        }
        _ => Err(MaskError::SurfaceMismatch {
            sentence_index: instance.sentence_index,
            expected: instance.masked_surface.clone(),
            start: instance.start,
            end: instance.end,
        }),
    }
}
