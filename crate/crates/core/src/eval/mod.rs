//! Simulated incompleteness: withhold half a document, predict from the
//! other half, and score the predictions against what was withheld.

pub mod baselines;
pub mod experiment;
pub mod metrics;
pub mod split;
pub mod stats;

use thiserror::Error;

use crate::ml::MlError;
use crate::pipeline::PipelineError;

pub use baselines::{baseline1, baseline2, baseline3, BaselineResult, SynonymLexicon};
pub use experiment::{run_experiment, EvalContext, EvalRecord, EvalReport, ExperimentConfig};
pub use metrics::{accuracy, coverage, filter_metrics, novel_terms, FilterMetrics, Score, TermSet};
pub use split::{split_document, DocumentSplit};
pub use stats::{vargha_delaney_a12, wilcoxon_rank_sum};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{doc_id}: {found} sentence(s), at least 2 needed to split")]
    TooFewSentences { doc_id: String, found: usize },
    #[error("synonym lexicon: {0}")]
    Lexicon(String),
    #[error("no trained filter for level `{0}`")]
    MissingFilter(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Ml(#[from] MlError),
}
