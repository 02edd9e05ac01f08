//! Ridge logistic regression fitted by Newton's method on standardized input.

use serde::{Deserialize, Serialize};

use super::encode::Scaler;
use super::Params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    scaler: Scaler,
    /// Bias first.
    coef: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Solves `a x = b` for symmetric positive definite `a` (Cholesky).
fn solve_spd(mut a: Vec<Vec<f64>>, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / d;
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i][k] * y[k];
        }
        y[i] = s / a[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= a[k][i] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

impl LogisticModel {
    /// Keys: `ridge` (default 1e-4), `max_iter` (default 50).
    pub fn fit(x: &[Vec<f64>], y: &[bool], w: &[f64], params: &Params) -> Self {
        let ridge = params.get("ridge", 1e-4);
        let max_iter = params.get("max_iter", 50.0) as usize;
        let scaler = Scaler::fit(x);
        let rows: Vec<Vec<f64>> = x
            .iter()
            .map(|r| {
                let mut v = vec![1.0];
                v.extend(scaler.apply(r));
                v
            })
            .collect();
        let d = rows.first().map_or(1, Vec::len);
        let total: f64 = w.iter().sum::<f64>().max(1e-12);
        let mut coef = vec![0.0; d];

        for _ in 0..max_iter {
            // gradient and Hessian of the mean weighted negative log-likelihood
            let mut grad = vec![0.0; d];
            let mut hess = vec![vec![0.0; d]; d];
            for ((r, &yi), &wi) in rows.iter().zip(y).zip(w) {
                let p = sigmoid(r.iter().zip(&coef).map(|(a, b)| a * b).sum());
                let g = wi * (p - f64::from(u8::from(yi))) / total;
                let h = wi * (p * (1.0 - p)).max(1e-10) / total;
                for i in 0..d {
                    grad[i] += g * r[i];
                    for j in 0..=i {
                        hess[i][j] += h * r[i] * r[j];
                    }
                }
            }
            for i in 0..d {
                for j in 0..i {
                    hess[j][i] = hess[i][j];
                }
                // the bias is not penalized
                if i > 0 {
                    grad[i] += ridge * coef[i];
                    hess[i][i] += ridge;
                } else {
                    hess[i][i] += 1e-10;
                }
            }
            let Some(step) = solve_spd(hess, &grad) else {
                break;
            };
            let mut change: f64 = 0.0;
            for (c, s) in coef.iter_mut().zip(&step) {
                *c -= s;
                change = change.max(s.abs());
            }
            if change < 1e-8 {
                break;
            }
        }
        LogisticModel { scaler, coef }
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        let z = self.coef[0]
            + self
                .scaler
                .apply(x)
                .iter()
                .zip(&self.coef[1..])
                .map(|(a, b)| a * b)
                .sum::<f64>();
        sigmoid(z)
    }
}
