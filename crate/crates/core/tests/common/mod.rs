#![allow(dead_code)]

use std::sync::Arc;

use reqcomp::mask::MaskedInstance;
use reqcomp::mlm::{check_k, MaskedLm, MlmError, Prediction, PredictionRecord};
use reqcomp::stub::{StubRequest, StubResponse, StubServer};

pub const VOCAB: [&str; 24] = [
    "signal", "track", "train", "network", "traffic", "security", "station", "platform", "timetable", "passenger",
    "freight", "maintenance", "operator", "controller", "interlocking", "route", "speed", "brake", "sensor",
    "schedule", "crossing", "barrier", "alarm", "driver",
];

fn fnv(text: &str) -> u64 {
    text.bytes()
        .fold(0xcbf29ce484222325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100000001b3))
}

/// Deterministic predictions that depend on every byte of the masked text,
/// so any change to the context shows up in the output.
pub fn fake_predictions(text: &str, k: usize) -> Vec<(String, f64)> {
    let start = (fnv(text) % VOCAB.len() as u64) as usize;
    (0..k.min(VOCAB.len()))
        .map(|i| (VOCAB[(start + 3 * i) % VOCAB.len()].to_string(), 0.5 / (i + 1) as f64))
        .collect()
}

pub struct FakeLm;

impl MaskedLm for FakeLm {
    fn get_predictions(&self, instance: &MaskedInstance, k: usize) -> Result<Vec<PredictionRecord>, MlmError> {
        check_k(k)?;
        Ok(fake_predictions(&instance.rendered, k)
            .into_iter()
            .enumerate()
            .map(|(i, (token, score))| PredictionRecord {
                instance: instance.clone(),
                prediction: Prediction { token, score },
                rank: i + 1,
            })
            .collect())
    }
}

/// A fill-mask service speaking the client's wire protocol.
pub fn fake_mlm_server() -> StubServer {
    StubServer::start(Arc::new(|req: &StubRequest| match req.path.as_str() {
        "/v1/health" => StubResponse::json(&serde_json::json!({"model": "fake", "ready": true})),
        "/v1/predict" => {
            let body: serde_json::Value = serde_json::from_slice(&req.body).unwrap();
            let text = body["text"].as_str().unwrap();
            let mask = body["mask_token"].as_str().unwrap();
            if text.matches(mask).count() != 1 {
                return StubResponse::status(400, "need exactly one mask");
            }
            let k = body["k"].as_u64().unwrap() as usize;
            let preds: Vec<_> = fake_predictions(text, k)
                .into_iter()
                .map(|(t, s)| serde_json::json!({"token": t, "score": s}))
                .collect();
            StubResponse::json(&serde_json::json!({ "predictions": preds }))
        }
        _ => StubResponse::status(404, "no route"),
    }))
    .unwrap()
}

pub const RAIL_A: &str = "The interlocking shall prevent conflicting routes at every level crossing. \
The controller shall monitor the track occupancy in real time. \
The system shall record every signal aspect shown to the driver. \
The operator shall confirm each route before the train departs. \
The barrier shall close before the train reaches the level crossing. \
The system shall alert the operator when a sensor fails. \
The timetable shall be published to every station display. \
The controller shall log all alarms with a timestamp.";

pub const RAIL_B: &str = "The depot shall schedule maintenance for each locomotive. \
The planner shall assign crews to every freight service. \
The system shall estimate arrival times from train positions. \
The platform display shall show delays for each passenger train. \
The dispatcher shall approve every change to the rail transport plan. \
The system shall archive the records of completed journeys. \
The station staff shall report faults through the maintenance portal.";
