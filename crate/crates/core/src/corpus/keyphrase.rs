use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::nlp::{AnnotatedDocument, Token};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Keyphrase {
    /// Lowercased surface of the first occurrence.
    pub text: String,
    /// Space-joined lemmas; unique within one extraction.
    pub lemma_key: String,
    pub source_count: usize,
}

fn usable(t: &Token) -> bool {
    t.surface.chars().all(char::is_alphabetic) && t.surface.chars().count() >= 2
}

/// Maximal `JJ* NN+` spans of one sentence.
fn noun_phrases(tokens: &[Token]) -> Vec<&[Token]> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let start = i;
        while i < tokens.len() && tokens[i].pos.is_adjective() && usable(&tokens[i]) {
            i += 1;
        }
        let nouns = i;
        while i < tokens.len() && tokens[i].pos.is_noun() && usable(&tokens[i]) {
            i += 1;
        }
        if i > nouns {
            out.push(&tokens[start..i]);
        } else {
            // no noun after the adjectives (or not a phrase start at all)
            i = start + 1;
        }
    }
    out
}

/// Noun phrases of the document, one per lemma key, most frequent first and
/// then by key.
pub fn extract_keyphrases(doc: &AnnotatedDocument) -> Vec<Keyphrase> {
    let mut by_key: HashMap<String, Keyphrase> = HashMap::new();
    for sentence in &doc.sentences {
        for span in noun_phrases(&sentence.tokens) {
            let lemma_key = span
                .iter()
                .map(|t| t.lemma.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            by_key
                .entry(lemma_key.clone())
                .or_insert_with(|| Keyphrase {
                    text: span
                        .iter()
                        .map(|t| t.surface.to_lowercase())
                        .collect::<Vec<_>>()
                        .join(" "),
                    lemma_key,
                    source_count: 0,
                })
                .source_count += 1;
        }
    }
    let mut out: Vec<Keyphrase> = by_key.into_values().collect();
    out.sort_by(|a, b| {
        b.source_count
            .cmp(&a.source_count)
            .then_with(|| a.lemma_key.cmp(&b.lemma_key))
    });
    out
}
