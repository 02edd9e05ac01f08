//! Ground truth for a split and the term-quality and filter metrics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::embeddings::{EmbeddingStore, DEFAULT_MATCH_THRESHOLD};
use crate::ml::Confusion;

pub type TermSet = BTreeSet<String>;

/// Terms of the withheld half that neither the disclosed half nor the
/// excluded words contain.
pub fn novel_terms(x: &TermSet, y: &TermSet, c: &TermSet) -> TermSet {
    y.iter().filter(|t| !x.contains(*t) && !c.contains(*t)).cloned().collect()
}

/// A ratio, 0 when its denominator is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub undefined: bool,
}

fn matched_share(from: &TermSet, against: &TermSet, store: &EmbeddingStore) -> Score {
    if from.is_empty() {
        return Score {
            value: 0.0,
            undefined: true,
        };
    }
    let hits = from
        .iter()
        .filter(|t| against.iter().any(|u| store.is_match(t, u, DEFAULT_MATCH_THRESHOLD)))
        .count();
    Score {
        value: hits as f64 / from.len() as f64,
        undefined: false,
    }
}

/// Share of `d` matching some novel term.
pub fn accuracy(d: &TermSet, n: &TermSet, store: &EmbeddingStore) -> Score {
    matched_share(d, n, store)
}

/// Share of novel terms matched by some term of `d`. Each novel term counts
/// once however many terms match it.
pub fn coverage(d: &TermSet, n: &TermSet, store: &EmbeddingStore) -> Score {
    matched_share(n, d, store)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterMetrics {
    pub confusion: Confusion,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

/// `actual[i]` is whether prediction `i` matches a novel term, `predicted[i]`
/// whether the filter kept it.
pub fn filter_metrics(actual: &[bool], predicted: &[bool]) -> FilterMetrics {
    let c = Confusion::from_pairs(actual, predicted);
    FilterMetrics {
        confusion: c,
        accuracy: c.accuracy(),
        precision: c.precision(),
        recall: c.recall(),
        undefined: c.undefined().into_iter().map(String::from).collect(),
    }
}
