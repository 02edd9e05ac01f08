//! FeatureVector to dense numeric input, and per-column standardization.

use serde::{Deserialize, Serialize};

use crate::features::FeatureVector;
use crate::nlp::{PosTag, WordClass};

/// Column names of [`encode`]'s output.
pub fn encoded_names() -> Vec<String> {
    let mut names = vec!["f1=verb".to_string()];
    names.extend(PosTag::ALL.iter().map(|t| format!("f2={}", t.as_str())));
    names.extend(
        [
            "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f9_undefined", "f10", "f11", "f12", "f13",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    names
}

/// Nominal columns one-hot (f1 as a single 0/1), booleans as 0/1, ordinals
/// as their rank, and f9 as its value (0 when undefined) plus an indicator.
pub fn encode(v: &FeatureVector) -> Vec<f64> {
    let mut x = Vec::with_capacity(1 + PosTag::ALL.len() + 12);
    x.push(f64::from(u8::from(v.f1 == WordClass::Verb)));
    x.extend(PosTag::ALL.iter().map(|&t| f64::from(u8::from(t == v.f2))));
    x.push(f64::from(u8::from(v.f3)));
    x.push(v.f4 as f64);
    x.push(v.f5 as f64);
    x.push(v.f6);
    x.push(v.f7);
    x.push(v.f8 as f64);
    x.push(v.f9.unwrap_or(0.0));
    x.push(f64::from(u8::from(v.f9.is_none())));
    x.push(f64::from(v.f10));
    x.push(f64::from(v.f11));
    x.push(v.f12);
    x.push(v.f13);
    x
}

/// Zero mean, unit variance per column. Constant columns map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let n = x.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in x {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    0.0
                }
            })
            .collect();
        Scaler { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), &s)| if s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }

    pub fn apply_all(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.apply(r)).collect()
    }
}
