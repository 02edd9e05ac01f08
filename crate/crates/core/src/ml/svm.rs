//! Linear soft-margin SVM (hinge loss) by dual coordinate descent. Instance
//! weights scale each example's box constraint.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encode::Scaler;
use super::Params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    scaler: Scaler,
    /// Bias last.
    w: Vec<f64>,
}

impl SvmModel {
    /// Keys: `c` (default 1.0), `epochs` (default 200).
    pub fn fit(x: &[Vec<f64>], y: &[bool], weights: &[f64], params: &Params, seed: u64) -> Self {
        let c = params.get("c", 1.0);
        let epochs = params.get("epochs", 200.0) as usize;
        let scaler = Scaler::fit(x);
        let rows: Vec<Vec<f64>> = x
            .iter()
            .map(|r| {
                let mut v = scaler.apply(r);
                v.push(1.0);
                v
            })
            .collect();
        let d = rows.first().map_or(1, Vec::len);
        let sign: Vec<f64> = y.iter().map(|&t| if t { 1.0 } else { -1.0 }).collect();
        let upper: Vec<f64> = weights.iter().map(|wi| c * wi).collect();
        let qii: Vec<f64> = rows.iter().map(|r| r.iter().map(|v| v * v).sum()).collect();
        let mut alpha = vec![0.0; rows.len()];
        let mut w = vec![0.0; d];
        let mut order: Vec<usize> = (0..rows.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        for _ in 0..epochs {
            order.shuffle(&mut rng);
            let mut max_step: f64 = 0.0;
            for &i in &order {
                if qii[i] <= 0.0 {
                    continue;
                }
                let margin: f64 = rows[i].iter().zip(&w).map(|(a, b)| a * b).sum();
                let grad = sign[i] * margin - 1.0;
                let new = (alpha[i] - grad / qii[i]).clamp(0.0, upper[i]);
                let delta = new - alpha[i];
                if delta != 0.0 {
                    alpha[i] = new;
                    for (wj, xj) in w.iter_mut().zip(&rows[i]) {
                        *wj += delta * sign[i] * xj;
                    }
                    max_step = max_step.max(delta.abs());
                }
            }
            if max_step < 1e-6 {
                break;
            }
        }
        SvmModel { scaler, w }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        let (bias, coef) = self.w.split_last().expect("bias present");
        bias + self
            .scaler
            .apply(x)
            .iter()
            .zip(coef)
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }
}
