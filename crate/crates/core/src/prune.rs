//! Rule-based removal of predictions that cannot be useful recommendations.

use std::collections::HashMap;

use crate::mlm::PredictionRecord;
use crate::nlp::{AnnotatedDocument, Pipeline};
use crate::words::WordLists;

pub const DEFAULT_COMMON_CUTOFF: usize = 250;

/// Lemma of the predicted word as it would be read in place of the masked
/// word. Falls back to a context-free lemma when the sentence is not in `doc`.
pub fn prediction_lemma(record: &PredictionRecord, doc: &AnnotatedDocument) -> String {
    let nlp = Pipeline::bundled();
    let token = &record.prediction.token;
    match doc.sentence(record.instance.sentence_index) {
        Some(s) if record.instance.token_index < s.tokens.len() => {
            nlp.retag_substituted(s, record.instance.token_index, token).1
        }
        _ => nlp.lemmatizer().lemmatize_bare(token),
    }
}

fn is_alphabetic_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(char::is_alphabetic)
}

/// Drops a prediction if it is not purely alphabetic, is one of the
/// `common_cutoff` most frequent words, is a stop or vague word, or its
/// lemma already occurs in `doc`. Order is preserved.
pub fn prune(
    records: &[PredictionRecord],
    doc: &AnnotatedDocument,
    lists: &WordLists,
    common_cutoff: usize,
) -> Vec<PredictionRecord> {
    let excluded = lists.excluded(common_cutoff);
    records
        .iter()
        .filter(|r| {
            let token = &r.prediction.token;
            if !is_alphabetic_word(token) {
                return false;
            }
            let lower = token.to_lowercase();
            !excluded.contains(&lower) && !doc.term_set.contains(&prediction_lemma(r, doc))
        })
        .cloned()
        .collect()
}

/// Keeps one record per prediction lemma: the highest-scoring one, the
/// earliest on ties. Survivors keep their relative order.
pub fn dedupe_by_lemma(
    records: &[PredictionRecord],
    doc: &AnnotatedDocument,
) -> Vec<PredictionRecord> {
    let mut best: HashMap<String, usize> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        let lemma = prediction_lemma(r, doc);
        best.entry(lemma)
            .and_modify(|j| {
                if r.prediction.score > records[*j].prediction.score {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    let mut keep: Vec<usize> = best.into_values().collect();
    keep.sort_unstable();
    keep.into_iter().map(|i| records[i].clone()).collect()
}
