//! Tokenizer, sentence splitter, POS tagger and lemmatizer.
//!
//! Everything here is deterministic and immutable after construction, so one
//! [`Pipeline`] can be shared across threads.

pub mod assets;
mod lemmatizer;
mod tagger;
mod tags;
mod tokenizer;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lemmatizer::{LemmaTables, Lemmatizer};
pub use tagger::Tagger;
pub use tags::{PosTag, UnknownTag, WordClass};
pub use tokenizer::{RawSentence, TokenSpan, Tokenizer};

#[derive(Debug, Error)]
pub enum NlpError {
    #[error("{asset}: line {line}: {reason}")]
    Asset {
        asset: &'static str,
        line: usize,
        reason: String,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// A tagged and lemmatized token. `start`/`end` are byte offsets into the
/// source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub pos: PosTag,
    pub lemma: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    /// Byte offset of `text` in the source.
    pub start: usize,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Byte range of token `i` within `self.text`.
    pub fn local_range(&self, i: usize) -> std::ops::Range<usize> {
        let t = &self.tokens[i];
        (t.start - self.start)..(t.end - self.start)
    }

    pub fn words(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }
}

/// One requirements document (or a subset of its sentences) with annotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedDocument {
    pub doc_id: String,
    pub sentences: Vec<Sentence>,
    /// Lemmas of every token containing a letter.
    pub term_set: BTreeSet<String>,
}

impl AnnotatedDocument {
    pub fn new(doc_id: impl Into<String>, sentences: Vec<Sentence>) -> Self {
        let term_set = term_set_of(&sentences);
        AnnotatedDocument {
            doc_id: doc_id.into(),
            sentences,
            term_set,
        }
    }

    /// The sentences whose index is in `indices`, in document order. Nothing
    /// from the other sentences survives, including their terms.
    pub fn subset(&self, indices: &BTreeSet<usize>) -> AnnotatedDocument {
        let sentences = self
            .sentences
            .iter()
            .filter(|s| indices.contains(&s.index))
            .cloned()
            .collect();
        AnnotatedDocument::new(self.doc_id.clone(), sentences)
    }

    pub fn sentence(&self, index: usize) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.index == index)
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }
}

fn term_set_of(sentences: &[Sentence]) -> BTreeSet<String> {
    sentences
        .iter()
        .flat_map(|s| &s.tokens)
        .filter(|t| t.surface.chars().any(char::is_alphabetic))
        .map(|t| t.lemma.clone())
        .collect()
}

/// The full annotation pipeline: tokenize, split, tag, lemmatize.
#[derive(Debug, Clone)]
pub struct Pipeline {
    tokenizer: Tokenizer,
    tagger: Tagger,
    lemmatizer: Lemmatizer,
}

impl Pipeline {
    pub fn new(tokenizer: Tokenizer, tagger: Tagger, lemmatizer: Lemmatizer) -> Self {
        Pipeline {
            tokenizer,
            tagger,
            lemmatizer,
        }
    }

    /// Pipeline over the data files compiled into the crate. Built once.
    pub fn bundled() -> &'static Pipeline {
        static BUNDLED: OnceLock<Pipeline> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            let tagger = Tagger::from_tables(assets::TAGGER_WEIGHTS, assets::TAGGER_TAGDICT)
                .expect("bundled tagger weights are valid");
            let lemmatizer = Lemmatizer::from_tables(&LemmaTables {
                rules: assets::LEMMA_RULES,
                noun_exc: assets::NOUN_EXC,
                verb_exc: assets::VERB_EXC,
                adj_exc: assets::ADJ_EXC,
                adv_exc: assets::ADV_EXC,
                noun_idx: assets::NOUN_IDX,
                verb_idx: assets::VERB_IDX,
                adj_idx: assets::ADJ_IDX,
                adv_idx: assets::ADV_IDX,
            })
            .expect("bundled lemma tables are valid");
            Pipeline::new(
                Tokenizer::from_list(assets::ABBREVIATIONS),
                tagger,
                lemmatizer,
            )
        })
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn tagger(&self) -> &Tagger {
        &self.tagger
    }

    pub fn lemmatizer(&self) -> &Lemmatizer {
        &self.lemmatizer
    }

    pub fn tokenize(&self, text: &str) -> Vec<TokenSpan> {
        self.tokenizer.tokenize(text)
    }

    pub fn split_sentences(&self, text: &str) -> Vec<RawSentence> {
        self.tokenizer.split_sentences(text)
    }

    pub fn pos_tag(&self, spans: &[TokenSpan]) -> Vec<PosTag> {
        let words: Vec<&str> = spans.iter().map(|s| s.surface.as_str()).collect();
        self.tagger.tag(&words)
    }

    pub fn lemmatize(&self, surface: &str, pos: PosTag) -> String {
        self.lemmatizer.lemmatize(surface, pos)
    }

    fn annotate_tokens(&self, spans: &[TokenSpan]) -> Vec<Token> {
        let tags = self.pos_tag(spans);
        spans
            .iter()
            .zip(tags)
            .map(|(s, pos)| Token {
                surface: s.surface.clone(),
                start: s.start,
                end: s.end,
                pos,
                lemma: self.lemmatizer.lemmatize(&s.surface, pos),
            })
            .collect()
    }

    pub fn annotate(&self, doc_id: &str, text: &str) -> AnnotatedDocument {
        let spans = self.tokenizer.tokenize(text);
        let sentences = self
            .tokenizer
            .sentence_ranges(text, &spans)
            .into_iter()
            .enumerate()
            .map(|(index, range)| {
                let spans = &spans[range];
                let start = spans[0].start;
                let end = spans[spans.len() - 1].end;
                Sentence {
                    index,
                    start,
                    text: text[start..end].to_string(),
                    tokens: self.annotate_tokens(spans),
                }
            })
            .collect();
        AnnotatedDocument::new(doc_id, sentences)
    }

    /// Re-tags `sentence` with token `index` replaced by `replacement` and
    /// returns the tag and lemma the replacement receives in that context.
    pub fn retag_substituted(
        &self,
        sentence: &Sentence,
        index: usize,
        replacement: &str,
    ) -> (PosTag, String) {
        let mut words = sentence.words();
        words[index] = replacement;
        let tags = self.tagger.tag(&words);
        let pos = tags[index];
        (pos, self.lemmatizer.lemmatize(replacement, pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INVENTORY: &str =
        "The system shall generate reports on inventory levels, product movement, and sales history.";

    #[test]
    fn annotate_composes_the_pipeline() {
        let doc = Pipeline::bundled().annotate("d", INVENTORY);
        assert_eq!(doc.sentences.len(), 1);
        let s = &doc.sentences[0];
        assert_eq!(s.tokens.len(), 16);
        assert_eq!(s.tokens[4].lemma, "report");
        assert_eq!(s.tokens[4].pos, PosTag::NNS);
        assert!(doc.term_set.contains("report"));
        assert!(doc.term_set.contains("shall"));
        assert!(!doc.term_set.contains(","));
    }

    #[test]
    fn offsets_and_tags_are_consistent() {
        let text = "Approx. 5 ms. The operator's console shall display alarms.\n\nNext item";
        let doc = Pipeline::bundled().annotate("d", text);
        assert_eq!(doc.sentences.len(), 3);
        for s in &doc.sentences {
            assert_eq!(&text[s.start..s.start + s.text.len()], s.text);
            for (i, t) in s.tokens.iter().enumerate() {
                assert_eq!(&text[t.start..t.end], t.surface);
                assert_eq!(&s.text[s.local_range(i)], t.surface);
                if t.surface.chars().all(char::is_alphabetic) {
                    assert!(!t.lemma.is_empty());
                }
            }
        }
    }

    #[test]
    fn annotation_is_deterministic() {
        let a = Pipeline::bundled().annotate("d", INVENTORY);
        let b = Pipeline::bundled().annotate("d", INVENTORY);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn empty_text() {
        let doc = Pipeline::bundled().annotate("d", "");
        assert!(doc.sentences.is_empty());
        assert!(doc.term_set.is_empty());
    }

    #[test]
    fn subset_drops_other_terms() {
        let doc = Pipeline::bundled().annotate("d", "Alpha logs events. Beta stores backups.");
        let half = doc.subset(&BTreeSet::from([1]));
        assert_eq!(half.sentences.len(), 1);
        assert_eq!(half.sentences[0].index, 1);
        assert!(half.term_set.contains("backup"));
        assert!(!half.term_set.contains("event"));
    }

    #[test]
    fn substitution_retags_in_context() {
        let doc = Pipeline::bundled().annotate("d", INVENTORY);
        let (pos, lemma) = Pipeline::bundled().retag_substituted(&doc.sentences[0], 4, "summaries");
        assert_eq!(pos, PosTag::NNS);
        assert_eq!(lemma, "summary");
    }
}
