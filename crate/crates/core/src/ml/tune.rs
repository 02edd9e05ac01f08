//! Random search over hyperparameters, scored by cross-validated accuracy.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cv::cross_validate_dense;
use super::{Algorithm, CostMatrix, LabeledDataset, MlError, Params};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Choice(Vec<f64>),
    Uniform { low: f64, high: f64 },
    LogUniform { low: f64, high: f64 },
    /// Inclusive integer range.
    Int { low: i64, high: i64 },
}

impl Domain {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Domain::Choice(v) => v[rng.gen_range(0..v.len())],
            Domain::Uniform { low, high } => low + (high - low) * rng.gen::<f64>(),
            Domain::LogUniform { low, high } => (low.ln() + (high.ln() - low.ln()) * rng.gen::<f64>()).exp(),
            Domain::Int { low, high } => rng.gen_range(*low..=*high) as f64,
        }
    }
}

pub type SearchSpace = BTreeMap<String, Domain>;

/// A modest space per learner.
pub fn default_space(algorithm: Algorithm) -> SearchSpace {
    let mut s = SearchSpace::new();
    let mut put = |k: &str, d: Domain| {
        s.insert(k.to_string(), d);
    };
    match algorithm {
        Algorithm::LR => put("ridge", Domain::LogUniform { low: 1e-6, high: 1.0 }),
        Algorithm::DT => {
            put("max_depth", Domain::Int { low: 2, high: 20 });
            put("min_leaf", Domain::Int { low: 1, high: 20 });
        }
        Algorithm::RF => {
            put("trees", Domain::Choice(vec![50.0, 100.0, 200.0]));
            put("max_depth", Domain::Int { low: 5, high: 30 });
            put("min_leaf", Domain::Int { low: 1, high: 5 });
        }
        Algorithm::SVM => put("c", Domain::LogUniform { low: 1e-3, high: 1e2 }),
        Algorithm::NN => {
            put("hidden", Domain::Int { low: 4, high: 64 });
            put("lr", Domain::LogUniform { low: 1e-3, high: 1e-1 });
            put("l2", Domain::LogUniform { low: 1e-6, high: 1e-2 });
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: Params,
    pub best_accuracy: f64,
    /// Every trial in evaluation order.
    pub trials: Vec<(Params, f64)>,
}

/// Trial `i` is the same configuration whatever the budget, so a larger
/// budget extends the trial sequence of a smaller one.
pub fn tune_dense(
    algorithm: Algorithm,
    x: &[Vec<f64>],
    y: &[bool],
    space: &SearchSpace,
    budget: usize,
    folds: usize,
    cost: Option<&CostMatrix>,
    seed: u64,
) -> Result<TuneResult, MlError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials: Vec<(Params, f64)> = Vec::with_capacity(budget.max(1));
    for _ in 0..budget.max(1) {
        let p = Params(space.iter().map(|(k, d)| (k.clone(), d.draw(&mut rng))).collect());
        let acc = cross_validate_dense(algorithm, x, y, &p, cost, folds, seed)?.accuracy();
        trials.push((p, acc));
    }
    let (best, best_accuracy) = trials
        .iter()
        .fold(None::<&(Params, f64)>, |b, t| match b {
            Some(b) if b.1 >= t.1 => Some(b),
            _ => Some(t),
        })
        .cloned()
        .expect("at least one trial");
    Ok(TuneResult {
        best,
        best_accuracy,
        trials,
    })
}

pub fn tune(
    algorithm: Algorithm,
    dataset: &LabeledDataset,
    space: &SearchSpace,
    budget: usize,
    folds: usize,
    cost: Option<&CostMatrix>,
    seed: u64,
) -> Result<TuneResult, MlError> {
    tune_dense(algorithm, &dataset.encoded(), &dataset.labels(), space, budget, folds, cost, seed)
}
