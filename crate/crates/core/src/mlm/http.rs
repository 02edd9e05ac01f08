use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{check_k, rank_predictions, MaskedLm, MlmError, Prediction, PredictionRecord};
use crate::mask::{render_for_model, MaskedInstance, DEFAULT_MASK_TOKEN};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub model: String,
    pub ready: bool,
}

#[derive(Serialize)]
struct PredictRequest<'a> {
    text: &'a str,
    mask_token: &'a str,
    k: usize,
}

#[derive(Deserialize)]
struct PredictResponse {
    predictions: Vec<Prediction>,
}

/// Client for a fill-mask service speaking `POST /v1/predict` and
/// `GET /v1/health`.
#[derive(Debug, Clone)]
pub struct HttpProvider {
    base_url: String,
    mask_token: String,
    concurrency: usize,
    agent: ureq::Agent,
}

impl HttpProvider {
    pub fn new(base_url: &str) -> Self {
        HttpProvider {
            base_url: base_url.trim_end_matches('/').to_string(),
            mask_token: DEFAULT_MASK_TOKEN.to_string(),
            concurrency: 4,
            agent: ureq::AgentBuilder::new()
                .timeout_connect(Duration::from_secs(5))
                .timeout(Duration::from_secs(120))
                .build(),
        }
    }

    pub fn with_mask_token(mut self, mask_token: &str) -> Self {
        self.mask_token = mask_token.to_string();
        self
    }

    /// Maximum requests in flight during a batch. At least 1.
    pub fn with_concurrency(mut self, n: usize) -> Self {
        self.concurrency = n.max(1);
        self
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    fn endpoint(&self, path: &str) -> String {
        format!("{}{path}", self.base_url)
    }

    fn call_error(&self, endpoint: String, e: ureq::Error) -> MlmError {
        match e {
            ureq::Error::Status(status, resp) => MlmError::Rejected {
                endpoint,
                status,
                body: resp.into_string().unwrap_or_default(),
            },
            ureq::Error::Transport(t) => MlmError::Unreachable {
                endpoint,
                reason: t.to_string(),
            },
        }
    }

    pub fn health(&self) -> Result<Health, MlmError> {
        let endpoint = self.endpoint("/v1/health");
        let resp = self
            .agent
            .get(&endpoint)
            .call()
            .map_err(|e| self.call_error(endpoint.clone(), e))?;
        resp.into_json()
            .map_err(|e| MlmError::Malformed(format!("{endpoint}: {e}")))
    }
}

impl MaskedLm for HttpProvider {
    fn get_predictions(
        &self,
        instance: &MaskedInstance,
        k: usize,
    ) -> Result<Vec<PredictionRecord>, MlmError> {
        check_k(k)?;
        let text = render_for_model(instance, &self.mask_token)?;
        let count = text.matches(self.mask_token.as_str()).count();
        if count != 1 {
            return Err(MlmError::MaskCount {
                mask: self.mask_token.clone(),
                count,
            });
        }
        let endpoint = self.endpoint("/v1/predict");
        let body = PredictRequest {
            text: &text,
            mask_token: &self.mask_token,
            k,
        };
        let resp = self
            .agent
            .post(&endpoint)
            .send_json(&body)
            .map_err(|e| self.call_error(endpoint.clone(), e))?;
        let parsed: PredictResponse = resp
            .into_json()
            .map_err(|e| MlmError::Malformed(format!("{endpoint}: {e}")))?;
        rank_predictions(instance, parsed.predictions, &self.mask_token, k)
    }

    fn get_predictions_batch(
        &self,
        instances: &[MaskedInstance],
        k: usize,
    ) -> Result<Vec<Vec<PredictionRecord>>, MlmError> {
        let next = AtomicUsize::new(0);
        let results: Vec<Mutex<Option<Result<Vec<PredictionRecord>, MlmError>>>> =
            instances.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..self.concurrency.min(instances.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(instance) = instances.get(i) else { break };
                    let r = self.get_predictions(instance, k);
                    let failed = r.is_err();
                    *results[i].lock().expect("no poisoned slots") = Some(r);
                    if failed {
                        // let the other workers drain; nothing new starts
                        next.store(instances.len(), Ordering::SeqCst);
                        break;
                    }
                });
            }
        });
        let mut out = Vec::with_capacity(instances.len());
        for slot in results {
            match slot.into_inner().expect("no poisoned slots") {
                Some(r) => out.push(r?),
                None => {
                    return Err(MlmError::Malformed(
                        "batch aborted after an earlier failure".into(),
                    ))
                }
            }
        }
        Ok(out)
    }
}
