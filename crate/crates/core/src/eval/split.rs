//! Random halving of a document into disclosed and withheld sentences.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::nlp::AnnotatedDocument;

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentSplit {
    pub doc_id: String,
    pub seed: u64,
    pub disclosed: BTreeSet<usize>,
    pub withheld: BTreeSet<usize>,
}

impl DocumentSplit {
    pub fn disclosed_doc(&self, doc: &AnnotatedDocument) -> AnnotatedDocument {
        doc.subset(&self.disclosed)
    }

    pub fn withheld_doc(&self, doc: &AnnotatedDocument) -> AnnotatedDocument {
        doc.subset(&self.withheld)
    }
}

/// Shuffles the sentence indices and discloses the first half, rounded up.
pub fn split_document(doc: &AnnotatedDocument, seed: u64) -> Result<DocumentSplit, EvalError> {
    let n = doc.sentences.len();
    if n < 2 {
        return Err(EvalError::TooFewSentences {
            doc_id: doc.doc_id.clone(),
            found: n,
        });
    }
    let mut idx: Vec<usize> = doc.sentences.iter().map(|s| s.index).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = n.div_ceil(2);
    Ok(DocumentSplit {
        doc_id: doc.doc_id.clone(),
        seed,
        disclosed: idx[..cut].iter().copied().collect(),
        withheld: idx[cut..].iter().copied().collect(),
    })
}
