//! Masked-word prediction providers.
//!
//! [`HttpProvider`] talks to a fill-mask service; [`FixtureStore`] replays
//! recorded predictions so that everything downstream runs offline.

mod fixture;
mod http;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::MaskedInstance;

pub use fixture::{FixtureKey, FixtureStore};
pub use http::{Health, HttpProvider};

pub const MAX_K: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub token: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub instance: MaskedInstance,
    pub prediction: Prediction,
    /// 1-based.
    pub rank: usize,
}

#[derive(Debug, Error)]
pub enum MlmError {
    #[error("k must be in 1..={MAX_K}, got {0}")]
    InvalidK(usize),
    #[error("rendered text must contain exactly one `{mask}`, found {count}")]
    MaskCount { mask: String, count: usize },
    #[error(transparent)]
    Mask(#[from] crate::mask::MaskError),
    #[error("provider at {endpoint} unreachable: {reason}")]
    Unreachable { endpoint: String, reason: String },
    #[error("provider at {endpoint} answered {status}: {body}")]
    Rejected {
        endpoint: String,
        status: u16,
        body: String,
    },
    #[error("malformed provider response: {0}")]
    Malformed(String),
    #[error("no recorded predictions for {0}")]
    FixtureMiss(FixtureKey),
    #[error("predictions for {0} already recorded")]
    DuplicateKey(FixtureKey),
    #[error("fixture {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Anything that returns the top-k predictions for a masked instance.
pub trait MaskedLm: Send + Sync {
    fn get_predictions(
        &self,
        instance: &MaskedInstance,
        k: usize,
    ) -> Result<Vec<PredictionRecord>, MlmError>;

    /// Predictions for many instances, in input order.
    fn get_predictions_batch(
        &self,
        instances: &[MaskedInstance],
        k: usize,
    ) -> Result<Vec<Vec<PredictionRecord>>, MlmError> {
        instances
            .iter()
            .map(|i| self.get_predictions(i, k))
            .collect()
    }
}

pub fn check_k(k: usize) -> Result<(), MlmError> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(MlmError::InvalidK(k))
    }
}

/// Turns raw provider output into ranked records: continuation pieces
/// (`##ing`), empty tokens and the mask token itself are dropped, scores are
/// validated, order is by descending score (stable), and at most `k` survive.
pub fn rank_predictions(
    instance: &MaskedInstance,
    raw: Vec<Prediction>,
    mask_token: &str,
    k: usize,
) -> Result<Vec<PredictionRecord>, MlmError> {
    let mut kept = Vec::with_capacity(raw.len());
    for p in raw {
        if !p.score.is_finite() || !(0.0..=1.0).contains(&p.score) {
            return Err(MlmError::Malformed(format!(
                "score {} for `{}` outside [0, 1]",
                p.score, p.token
            )));
        }
        let token = p.token.trim();
        if token.is_empty() || token.starts_with("##") || token == mask_token {
            continue;
        }
        kept.push(Prediction {
            token: token.to_string(),
            score: p.score,
        });
    }
    kept.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(kept
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, prediction)| PredictionRecord {
            instance: instance.clone(),
            prediction,
            rank: i + 1,
        })
        .collect())
}
