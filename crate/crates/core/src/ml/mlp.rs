//! Feed-forward network with one tanh hidden layer and a sigmoid output,
//! trained full-batch with Adam on weighted cross-entropy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encode::Scaler;
use super::Params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    scaler: Scaler,
    /// hidden x (inputs + 1), bias last in each row.
    w1: Vec<Vec<f64>>,
    /// hidden + 1, bias last.
    w2: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [&mut f64], grads: &[f64], lr: f64) {
        const B1: f64 = 0.9;
        const B2: f64 = 0.999;
        self.t += 1;
        let c1 = 1.0 - B1.powi(self.t);
        let c2 = 1.0 - B2.powi(self.t);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            self.m[k] = B1 * self.m[k] + (1.0 - B1) * g;
            self.v[k] = B2 * self.v[k] + (1.0 - B2) * g * g;
            **p -= lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + 1e-8);
        }
    }
}

impl MlpModel {
    /// Keys: `hidden` (default 16), `epochs` (default 300), `lr` (default
    /// 0.01), `l2` (default 1e-4).
    pub fn fit(x: &[Vec<f64>], y: &[bool], w: &[f64], params: &Params, seed: u64) -> Self {
        let hidden = (params.get("hidden", 16.0) as usize).max(1);
        let epochs = params.get("epochs", 300.0) as usize;
        let lr = params.get("lr", 0.01);
        let l2 = params.get("l2", 1e-4);
        let scaler = Scaler::fit(x);
        let rows = scaler.apply_all(x);
        let d = rows.first().map_or(0, Vec::len);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = (6.0 / (d + hidden) as f64).sqrt();
        let mut w1: Vec<Vec<f64>> = (0..hidden)
            .map(|_| {
                let mut r: Vec<f64> = (0..d).map(|_| rng.gen_range(-bound..bound)).collect();
                r.push(0.0);
                r
            })
            .collect();
        let mut w2: Vec<f64> = (0..hidden).map(|_| rng.gen_range(-bound..bound)).collect();
        w2.push(0.0);
        let total: f64 = w.iter().sum::<f64>().max(1e-12);
        let mut adam = Adam::new(hidden * (d + 1) + hidden + 1);
        let mut h = vec![0.0; hidden];

        for _ in 0..epochs {
            let mut g1 = vec![vec![0.0; d + 1]; hidden];
            let mut g2 = vec![0.0; hidden + 1];
            for ((r, &yi), &wi) in rows.iter().zip(y).zip(w) {
                for (hj, row) in h.iter_mut().zip(&w1) {
                    *hj = (row[d] + row[..d].iter().zip(r).map(|(a, b)| a * b).sum::<f64>()).tanh();
                }
                let out = sigmoid(w2[hidden] + h.iter().zip(&w2).map(|(a, b)| a * b).sum::<f64>());
                let delta = wi * (out - f64::from(u8::from(yi))) / total;
                for j in 0..hidden {
                    g2[j] += delta * h[j];
                    let dh = delta * w2[j] * (1.0 - h[j] * h[j]);
                    for (g, xv) in g1[j].iter_mut().zip(r) {
                        *g += dh * xv;
                    }
                    g1[j][d] += dh;
                }
                g2[hidden] += delta;
            }
            for j in 0..hidden {
                for k in 0..d {
                    g1[j][k] += l2 * w1[j][k];
                }
                g2[j] += l2 * w2[j];
            }
            let grads: Vec<f64> = g1.into_iter().flatten().chain(g2).collect();
            let mut params: Vec<&mut f64> = w1.iter_mut().flatten().chain(w2.iter_mut()).collect();
            adam.step(&mut params, &grads, lr);
        }
        MlpModel { scaler, w1, w2 }
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        let r = self.scaler.apply(x);
        let d = r.len();
        let hidden = self.w1.len();
        let z: f64 = self
            .w1
            .iter()
            .zip(&self.w2)
            .map(|(row, v)| v * (row[d] + row[..d].iter().zip(&r).map(|(a, b)| a * b).sum::<f64>()).tanh())
            .sum();
        sigmoid(z + self.w2[hidden])
    }
}
