//! The three named filter configurations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{train, undersample, Algorithm, CostMatrix, FilterModel, LabeledDataset, MlError, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// RF on the full training set.
    Strict,
    /// RF on under-sampled data.
    Moderate,
    /// SVM on under-sampled data with false negatives costing double.
    Lenient,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Strict, Preset::Moderate, Preset::Lenient];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Strict => "strict",
            Preset::Moderate => "moderate",
            Preset::Lenient => "lenient",
        }
    }

    pub fn algorithm(self) -> Algorithm {
        match self {
            Preset::Strict | Preset::Moderate => Algorithm::RF,
            Preset::Lenient => Algorithm::SVM,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown preset `{s}` (expected strict, moderate or lenient)"))
    }
}

pub const SAMPLING_RATIO: f64 = 1.0;

/// Trains the preset with default hyperparameters, or `params` if given.
pub fn preset(name: Preset, data: &LabeledDataset, params: Option<&Params>, seed: u64) -> Result<FilterModel, MlError> {
    let params = params.cloned().unwrap_or_default();
    let (sampled, ratio) = match name {
        Preset::Strict => (None, None),
        Preset::Moderate | Preset::Lenient => (Some(undersample(data, SAMPLING_RATIO, seed)?), Some(SAMPLING_RATIO)),
    };
    let cost = (name == Preset::Lenient).then(CostMatrix::default);
    let mut model = train(name.algorithm(), sampled.as_ref().unwrap_or(data), &params, cost, seed)?;
    model.config.sampling_ratio = ratio;
    Ok(model)
}
