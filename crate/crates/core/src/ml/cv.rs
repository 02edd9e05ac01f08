//! Confusion counts and stratified k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fit_dense, Algorithm, CostMatrix, LabeledDataset, MlError, Params};

/// Counts with "relevant" as the positive class. Ratios with an empty
/// denominator are 0 and reported by [`Confusion::undefined`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Confusion {
    pub fn from_pairs(actual: &[bool], predicted: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&a, &p) in actual.iter().zip(predicted) {
            c.add(a, p);
        }
        c
    }

    pub fn add(&mut self, actual: bool, predicted: bool) {
        match (actual, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fn_ += 1,
        }
    }

    pub fn merge(&mut self, o: &Confusion) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.tn += o.tn;
        self.fn_ += o.fn_;
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Names of the ratios whose denominator is zero.
    pub fn undefined(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.total() == 0 {
            v.push("accuracy");
        }
        if self.tp + self.fp == 0 {
            v.push("precision");
        }
        if self.tp + self.fn_ == 0 {
            v.push("recall");
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<Confusion>,
    /// Sum over folds.
    pub pooled: Confusion,
}

impl CvReport {
    pub fn accuracy(&self) -> f64 {
        self.pooled.accuracy()
    }

    pub fn precision(&self) -> f64 {
        self.pooled.precision()
    }

    pub fn recall(&self) -> f64 {
        self.pooled.recall()
    }
}

/// Fold index of every row. Each class is shuffled and dealt round-robin,
/// the negatives continuing where the positives stopped.
pub fn stratified_folds(y: &[bool], folds: usize, seed: u64) -> Result<Vec<usize>, MlError> {
    let pos: Vec<usize> = (0..y.len()).filter(|&i| y[i]).collect();
    let neg: Vec<usize> = (0..y.len()).filter(|&i| !y[i]).collect();
    let minority = pos.len().min(neg.len());
    if folds < 2 || folds > minority {
        return Err(MlError::TooManyFolds { folds, minority });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = vec![0; y.len()];
    let mut k = 0;
    for mut class in [pos, neg] {
        class.shuffle(&mut rng);
        for i in class {
            assign[i] = k % folds;
            k += 1;
        }
    }
    Ok(assign)
}

/// Every row is tested once, by a model trained on the other folds with
/// the same seed. Folds run in parallel.
pub fn cross_validate_dense(
    algorithm: Algorithm,
    x: &[Vec<f64>],
    y: &[bool],
    params: &Params,
    cost: Option<&CostMatrix>,
    folds: usize,
    seed: u64,
) -> Result<CvReport, MlError> {
    let assign = stratified_folds(y, folds, seed)?;
    let run = |f: usize| -> Result<Confusion, MlError> {
        let train: Vec<usize> = (0..y.len()).filter(|&i| assign[i] != f).collect();
        let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
        let ty: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        let w = CostMatrix::weights(cost, &ty);
        let model = fit_dense(algorithm, &tx, &ty, &w, params, seed)?;
        let mut c = Confusion::default();
        for i in (0..y.len()).filter(|&i| assign[i] == f) {
            c.add(y[i], model.predict(&x[i]));
        }
        Ok(c)
    };
    let results: Vec<Result<Confusion, MlError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..folds).map(|f| s.spawn(move || run(f))).collect();
        handles.into_iter().map(|h| h.join().expect("fold worker panicked")).collect()
    });
    let folds = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut pooled = Confusion::default();
    folds.iter().for_each(|c| pooled.merge(c));
    Ok(CvReport { folds, pooled })
}

pub fn cross_validate(
    algorithm: Algorithm,
    dataset: &LabeledDataset,
    folds: usize,
    cost: Option<&CostMatrix>,
    params: &Params,
    seed: u64,
) -> Result<CvReport, MlError> {
    cross_validate_dense(algorithm, &dataset.encoded(), &dataset.labels(), params, cost, folds, seed)
}
