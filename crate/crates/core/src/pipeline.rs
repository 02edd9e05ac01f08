//! Masking, prediction, pruning and featurization of one document.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{extract_keyphrases, mine, CorpusError, DomainCorpus, MineLimits, WikiClient};
use crate::embeddings::EmbeddingStore;
use crate::features::{build_matrix, FeatureMatrix, Label};
use crate::mask::generate_masked_instances;
use crate::ml::MlError;
use crate::mlm::{MaskedLm, MlmError, PredictionRecord};
use crate::nlp::AnnotatedDocument;
use crate::prune::{prediction_lemma, prune, DEFAULT_COMMON_CUTOFF};
use crate::words::WordLists;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Mlm(#[from] MlmError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Ml(#[from] MlError),
}

/// Where a document's domain corpus comes from.
pub trait CorpusSource: Send + Sync {
    fn corpus_for(&self, doc: &AnnotatedDocument) -> Result<DomainCorpus, CorpusError>;
}

/// No corpus: F11 to F13 take their empty-corpus values.
pub struct NoCorpus;

impl CorpusSource for NoCorpus {
    fn corpus_for(&self, _doc: &AnnotatedDocument) -> Result<DomainCorpus, CorpusError> {
        Ok(DomainCorpus::empty(""))
    }
}

/// A corpus already on disk, used for every document.
pub struct FixedCorpus(pub DomainCorpus);

impl CorpusSource for FixedCorpus {
    fn corpus_for(&self, _doc: &AnnotatedDocument) -> Result<DomainCorpus, CorpusError> {
        Ok(self.0.clone())
    }
}

/// Mines a fresh corpus from each document's own keyphrases.
pub struct MinedCorpus {
    pub client: WikiClient,
    pub depth: usize,
    pub limits: MineLimits,
}

impl CorpusSource for MinedCorpus {
    fn corpus_for(&self, doc: &AnnotatedDocument) -> Result<DomainCorpus, CorpusError> {
        mine(&self.client, &extract_keyphrases(doc), self.depth, &self.limits)
    }
}

pub struct Assets {
    pub lists: WordLists,
    pub store: EmbeddingStore,
    pub common_cutoff: usize,
}

impl Default for Assets {
    fn default() -> Self {
        Assets {
            lists: WordLists::bundled(),
            store: EmbeddingStore::default(),
            common_cutoff: DEFAULT_COMMON_CUTOFF,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub doc_id: String,
    pub masks: usize,
    pub raw_predictions: usize,
    /// Predictions surviving pruning, one feature row each.
    pub kept: Vec<PredictionRecord>,
    /// Prediction lemma of each kept record.
    pub lemmas: Vec<String>,
    pub matrix: FeatureMatrix,
    #[serde(skip)]
    pub corpus: DomainCorpus,
}

impl Analysis {
    /// The deduplicated lemmas of every kept prediction.
    pub fn terms(&self) -> BTreeSet<String> {
        self.lemmas.iter().cloned().collect()
    }

    /// The deduplicated lemmas of the predictions classified relevant.
    pub fn filtered_terms(&self, labels: &[Label]) -> BTreeSet<String> {
        self.lemmas
            .iter()
            .zip(labels)
            .filter(|(_, l)| l.is_relevant())
            .map(|(t, _)| t.clone())
            .collect()
    }
}

/// Everything downstream sees only `doc`.
pub fn analyze(
    doc: &AnnotatedDocument,
    provider: &dyn MaskedLm,
    k: usize,
    corpus: &dyn CorpusSource,
    assets: &Assets,
) -> Result<Analysis, PipelineError> {
    let instances = generate_masked_instances(doc);
    let raw: Vec<PredictionRecord> = provider
        .get_predictions_batch(&instances, k)?
        .into_iter()
        .flatten()
        .collect();
    let kept = prune(&raw, doc, &assets.lists, assets.common_cutoff);
    let lemmas = kept.iter().map(|r| prediction_lemma(r, doc)).collect();
    let corpus = corpus.corpus_for(doc)?;
    let matrix = build_matrix(&kept, doc, &corpus, &assets.store);
    Ok(Analysis {
        doc_id: doc.doc_id.clone(),
        masks: instances.len(),
        raw_predictions: raw.len(),
        kept,
        lemmas,
        matrix,
        corpus,
    })
}
