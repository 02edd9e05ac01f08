//! Relevance filter: binary classifiers over feature rows, with
//! cost-sensitive instance weights, cross-validation, random search and
//! persistence.

pub mod cv;
pub mod encode;
pub mod info_gain;
pub mod logistic;
pub mod mlp;
pub mod presets;
pub mod svm;
pub mod tree;
pub mod tune;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embeddings::{EmbeddingStore, DEFAULT_MATCH_THRESHOLD};
use crate::features::{FeatureMatrix, FeatureVector, Label, Schema};

pub use cv::{cross_validate, cross_validate_dense, stratified_folds, Confusion, CvReport};
pub use info_gain::info_gain_ranking;
pub use presets::{preset, Preset};
pub use tune::{tune, tune_dense, Domain, SearchSpace, TuneResult};

use logistic::LogisticModel;
use mlp::MlpModel;
use svm::SvmModel;
use tree::{ForestModel, TreeModel};

pub const MODEL_FORMAT: &str = "reqcomp-filter-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MlError {
    #[error("unsupported algorithm `{0}` (expected LR, DT, RF, SVM or NN)")]
    UnsupportedAlgorithm(String),
    #[error("degenerate dataset: {0}")]
    Degenerate(String),
    #[error("invalid cost matrix: costs must be positive and finite")]
    InvalidCost,
    #[error("invalid sampling ratio {0}")]
    InvalidRatio(f64),
    #[error("{folds} folds requested but the minority class has {minority} rows")]
    TooManyFolds { folds: usize, minority: usize },
    #[error("schema mismatch: model expects {expected}, got {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("model file version {found}, this build reads version {expected}")]
    Version { found: u64, expected: u32 },
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    LR,
    DT,
    RF,
    SVM,
    NN,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [Algorithm::LR, Algorithm::DT, Algorithm::RF, Algorithm::SVM, Algorithm::NN];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::LR => "LR",
            Algorithm::DT => "DT",
            Algorithm::RF => "RF",
            Algorithm::SVM => "SVM",
            Algorithm::NN => "NN",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = MlError;

    fn from_str(s: &str) -> Result<Self, MlError> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| MlError::UnsupportedAlgorithm(s.to_string()))
    }
}

/// Named numeric hyperparameters. Each learner documents its keys and
/// falls back to its defaults for absent ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(pub BTreeMap<String, f64>);

impl Params {
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        Params(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    pub cost_fn: f64,
    pub cost_fp: f64,
}

impl CostMatrix {
    pub fn new(cost_fn: f64, cost_fp: f64) -> Result<Self, MlError> {
        let ok = |c: f64| c.is_finite() && c > 0.0;
        if ok(cost_fn) && ok(cost_fp) {
            Ok(CostMatrix { cost_fn, cost_fp })
        } else {
            Err(MlError::InvalidCost)
        }
    }

    /// Instance weights: positives carry the false-negative cost.
    pub fn weights(cost: Option<&CostMatrix>, y: &[bool]) -> Vec<f64> {
        y.iter()
            .map(|&t| match (cost, t) {
                (None, _) => 1.0,
                (Some(c), true) => c.cost_fn,
                (Some(c), false) => c.cost_fp,
            })
            .collect()
    }
}

impl Default for CostMatrix {
    fn default() -> Self {
        CostMatrix {
            cost_fn: 2.0,
            cost_fp: 1.0,
        }
    }
}

/// A fitted learner over dense numeric rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Trained {
    /// Fitted on a single-class sample.
    Constant { relevant: bool },
    Logistic(LogisticModel),
    Tree(TreeModel),
    Forest(ForestModel),
    Svm(SvmModel),
    Mlp(MlpModel),
}

impl Trained {
    pub fn predict(&self, x: &[f64]) -> bool {
        match self {
            Trained::Constant { relevant } => *relevant,
            Trained::Logistic(m) => m.probability(x) > 0.5,
            Trained::Tree(m) => m.probability(x) > 0.5,
            Trained::Forest(m) => m.probability(x) > 0.5,
            Trained::Svm(m) => m.decision(x) > 0.0,
            Trained::Mlp(m) => m.probability(x) > 0.5,
        }
    }
}

/// Fits `algorithm` on dense rows with per-row weights.
pub fn fit_dense(
    algorithm: Algorithm,
    x: &[Vec<f64>],
    y: &[bool],
    w: &[f64],
    params: &Params,
    seed: u64,
) -> Result<Trained, MlError> {
    if x.is_empty() {
        return Err(MlError::Degenerate("no rows".into()));
    }
    if x.len() != y.len() || x.len() != w.len() {
        return Err(MlError::Degenerate("rows, labels and weights differ in length".into()));
    }
    let width = x[0].len();
    if x.iter().any(|r| r.len() != width || r.iter().any(|v| !v.is_finite())) {
        return Err(MlError::Degenerate("ragged or non-finite rows".into()));
    }
    if y.iter().all(|&t| t == y[0]) {
        return Ok(Trained::Constant { relevant: y[0] });
    }
    Ok(match algorithm {
        Algorithm::LR => Trained::Logistic(LogisticModel::fit(x, y, w, params)),
        Algorithm::DT => Trained::Tree(TreeModel::fit(x, y, w, params, seed)),
        Algorithm::RF => Trained::Forest(ForestModel::fit(x, y, w, params, seed)),
        Algorithm::SVM => Trained::Svm(SvmModel::fit(x, y, w, params, seed)),
        Algorithm::NN => Trained::Mlp(MlpModel::fit(x, y, w, params, seed)),
    })
}

/// A feature matrix whose every row carries a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub matrix: FeatureMatrix,
    pub relevant: usize,
    pub non_relevant: usize,
    /// Source documents, in first-seen order.
    pub documents: Vec<String>,
}

impl LabeledDataset {
    /// Wraps a matrix whose rows are all labeled.
    pub fn from_matrix(matrix: FeatureMatrix) -> Result<Self, MlError> {
        let mut relevant = 0;
        for (i, r) in matrix.rows.iter().enumerate() {
            match r.label {
                Some(Label::Relevant) => relevant += 1,
                Some(Label::NonRelevant) => {}
                None => return Err(MlError::Degenerate(format!("row {i} is unlabeled"))),
            }
        }
        let mut documents: Vec<String> = Vec::new();
        for s in &matrix.sources {
            if !documents.contains(&s.doc_id) {
                documents.push(s.doc_id.clone());
            }
        }
        Ok(LabeledDataset {
            relevant,
            non_relevant: matrix.rows.len() - relevant,
            matrix,
            documents,
        })
    }

    /// Concatenates datasets, keeping row order.
    pub fn merge(parts: impl IntoIterator<Item = LabeledDataset>) -> Result<Self, MlError> {
        let mut all = FeatureMatrix::empty("merged");
        for p in parts {
            if p.matrix.schema.fingerprint != all.schema.fingerprint {
                return Err(MlError::SchemaMismatch {
                    expected: all.schema.fingerprint.clone(),
                    found: p.matrix.schema.fingerprint,
                });
            }
            all.extend(p.matrix);
        }
        Self::from_matrix(all)
    }

    pub fn len(&self) -> usize {
        self.matrix.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.matrix
            .rows
            .iter()
            .map(|r| r.label.is_some_and(Label::is_relevant))
            .collect()
    }

    pub fn encoded(&self) -> Vec<Vec<f64>> {
        self.matrix.rows.iter().map(encode::encode).collect()
    }

    fn select(&self, keep: &[usize]) -> Self {
        let mut matrix = FeatureMatrix {
            rows: Vec::with_capacity(keep.len()),
            sources: Vec::with_capacity(keep.len()),
            ..self.matrix.clone()
        };
        matrix.rows.clear();
        matrix.sources.clear();
        for &i in keep {
            matrix.rows.push(self.matrix.rows[i].clone());
            matrix.sources.push(self.matrix.sources[i].clone());
        }
        Self::from_matrix(matrix).expect("subset of a labeled dataset is labeled")
    }
}

/// Labels each row relevant when its prediction lemma matches a novel term.
pub fn label_dataset(mut matrix: FeatureMatrix, novel_terms: &BTreeSet<String>, store: &EmbeddingStore) -> LabeledDataset {
    for (row, src) in matrix.rows.iter_mut().zip(&matrix.sources) {
        let hit = novel_terms
            .iter()
            .any(|t| store.is_match(&src.lemma, t, DEFAULT_MATCH_THRESHOLD));
        row.label = Some(if hit { Label::Relevant } else { Label::NonRelevant });
    }
    LabeledDataset::from_matrix(matrix).expect("every row labeled")
}

/// Randomly drops majority rows until majority/minority is `ratio` (or the
/// majority runs out). Minority rows and row order are kept.
pub fn undersample(dataset: &LabeledDataset, ratio: f64, seed: u64) -> Result<LabeledDataset, MlError> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(MlError::InvalidRatio(ratio));
    }
    if dataset.relevant == 0 || dataset.non_relevant == 0 {
        return Err(MlError::Degenerate("undersampling needs both classes".into()));
    }
    let labels = dataset.labels();
    let minority_is_relevant = dataset.relevant <= dataset.non_relevant;
    let minority = dataset.relevant.min(dataset.non_relevant);
    let majority_rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] != minority_is_relevant).collect();
    let target = ((minority as f64 * ratio).round() as usize).min(majority_rows.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: BTreeSet<usize> = sample(&mut rng, majority_rows.len(), target)
        .into_iter()
        .map(|j| majority_rows[j])
        .collect();
    let keep: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == minority_is_relevant || chosen.contains(&i))
        .collect();
    Ok(dataset.select(&keep))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Majority/minority ratio the training data was under-sampled to.
    pub sampling_ratio: Option<f64>,
    pub cost: Option<CostMatrix>,
    pub params: Params,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterModel {
    pub algorithm: Algorithm,
    pub config: TrainConfig,
    pub schema_fingerprint: String,
    /// Training class counts.
    pub relevant: usize,
    pub non_relevant: usize,
    pub model: Trained,
}

pub fn train(
    algorithm: Algorithm,
    dataset: &LabeledDataset,
    params: &Params,
    cost: Option<CostMatrix>,
    seed: u64,
) -> Result<FilterModel, MlError> {
    let y = dataset.labels();
    let w = CostMatrix::weights(cost.as_ref(), &y);
    let model = fit_dense(algorithm, &dataset.encoded(), &y, &w, params, seed)?;
    Ok(FilterModel {
        algorithm,
        config: TrainConfig {
            sampling_ratio: None,
            cost,
            params: params.clone(),
            seed,
        },
        schema_fingerprint: dataset.matrix.schema.fingerprint.clone(),
        relevant: dataset.relevant,
        non_relevant: dataset.non_relevant,
        model,
    })
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: FilterModel,
}

impl FilterModel {
    fn check_schema(&self, schema: &Schema) -> Result<(), MlError> {
        if schema.fingerprint != self.schema_fingerprint {
            return Err(MlError::SchemaMismatch {
                expected: self.schema_fingerprint.clone(),
                found: schema.fingerprint.clone(),
            });
        }
        Ok(())
    }

    pub fn classify(&self, schema: &Schema, v: &FeatureVector) -> Result<Label, MlError> {
        self.check_schema(schema)?;
        Ok(self.classify_unchecked(v))
    }

    fn classify_unchecked(&self, v: &FeatureVector) -> Label {
        if self.model.predict(&encode::encode(v)) {
            Label::Relevant
        } else {
            Label::NonRelevant
        }
    }

    pub fn classify_matrix(&self, matrix: &FeatureMatrix) -> Result<Vec<Label>, MlError> {
        self.check_schema(&matrix.schema)?;
        Ok(matrix.rows.iter().map(|v| self.classify_unchecked(v)).collect())
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, MlError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| MlError::Corrupt(e.to_string()))?;
        if value.get("format").and_then(|f| f.as_str()) != Some(MODEL_FORMAT) {
            return Err(MlError::Corrupt("not a filter model file".into()));
        }
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| MlError::Corrupt("missing version".into()))?;
        if version != u64::from(MODEL_VERSION) {
            return Err(MlError::Version {
                found: version,
                expected: MODEL_VERSION,
            });
        }
        let file: ModelFile = serde_json::from_value(value).map_err(|e| MlError::Corrupt(e.to_string()))?;
        Ok(file.model)
    }

    pub fn save(&self, path: &Path) -> Result<(), MlError> {
        std::fs::write(path, self.to_json()).map_err(|source| MlError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

pub fn load_model(path: &Path) -> Result<FilterModel, MlError> {
    let text = std::fs::read_to_string(path).map_err(|source| MlError::Io {
        path: path.display().to_string(),
        source,
    })?;
    FilterModel::from_json(&text)
}
