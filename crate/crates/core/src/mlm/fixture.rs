use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_k, MaskedLm, MlmError, Prediction, PredictionRecord};
use crate::mask::MaskedInstance;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixtureKey {
    pub doc_id: String,
    pub sentence_index: usize,
    pub token_index: usize,
    pub k: usize,
}

impl fmt::Display for FixtureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}#s{}t{}@k{}",
            self.doc_id, self.sentence_index, self.token_index, self.k
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Entry {
    sentence_index: usize,
    token_index: usize,
    k: usize,
    masked_surface: String,
    predictions: Vec<Prediction>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
struct DocFixture {
    doc_id: String,
    /// When set, instances without an entry get no predictions instead of a
    /// miss. For hand-made fixtures that only cover a few masks.
    #[serde(default)]
    partial: bool,
    entries: Vec<Entry>,
}

/// Recorded predictions, one JSON file per input document.
#[derive(Debug, Clone, Default)]
pub struct FixtureStore {
    docs: BTreeMap<String, DocFixture>,
}

fn file_stem(doc_id: &str) -> String {
    doc_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

impl FixtureStore {
    pub fn new() -> Self {
        FixtureStore::default()
    }

    /// Marks `doc_id` as partially recorded (see [`FixtureStore::lookup`]).
    pub fn set_partial(&mut self, doc_id: &str, partial: bool) {
        self.docs
            .entry(doc_id.to_string())
            .or_insert_with(|| DocFixture {
                doc_id: doc_id.to_string(),
                ..DocFixture::default()
            })
            .partial = partial;
    }

    pub fn len(&self) -> usize {
        self.docs.values().map(|d| d.entries.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn record_fixture(
        &mut self,
        instance: &MaskedInstance,
        k: usize,
        records: &[PredictionRecord],
    ) -> Result<(), MlmError> {
        let key = FixtureKey {
            doc_id: instance.doc_id.clone(),
            sentence_index: instance.sentence_index,
            token_index: instance.token_index,
            k,
        };
        let doc = self
            .docs
            .entry(instance.doc_id.clone())
            .or_insert_with(|| DocFixture {
                doc_id: instance.doc_id.clone(),
                ..DocFixture::default()
            });
        if doc.entries.iter().any(|e| {
            (e.sentence_index, e.token_index, e.k) == (key.sentence_index, key.token_index, k)
        }) {
            return Err(MlmError::DuplicateKey(key));
        }
        let mut ranked: Vec<&PredictionRecord> = records.iter().collect();
        ranked.sort_by_key(|r| r.rank);
        doc.entries.push(Entry {
            sentence_index: instance.sentence_index,
            token_index: instance.token_index,
            k,
            masked_surface: instance.masked_surface.clone(),
            predictions: ranked.into_iter().map(|r| r.prediction.clone()).collect(),
        });
        Ok(())
    }

    /// Recorded predictions for `instance`. An entry recorded with a larger k
    /// serves smaller requests by truncation.
    pub fn lookup(&self, instance: &MaskedInstance, k: usize) -> Result<Vec<PredictionRecord>, MlmError> {
        let key = FixtureKey {
            doc_id: instance.doc_id.clone(),
            sentence_index: instance.sentence_index,
            token_index: instance.token_index,
            k,
        };
        let Some(doc) = self.docs.get(&instance.doc_id) else {
            return Err(MlmError::FixtureMiss(key));
        };
        let entry = doc
            .entries
            .iter()
            .filter(|e| {
                e.sentence_index == instance.sentence_index
                    && e.token_index == instance.token_index
                    && e.k >= k
            })
            .min_by_key(|e| e.k);
        let Some(entry) = entry else {
            return if doc.partial {
                Ok(Vec::new())
            } else {
                Err(MlmError::FixtureMiss(key))
            };
        };
        if entry.masked_surface != instance.masked_surface {
            return Err(MlmError::Malformed(format!(
                "fixture {key} was recorded for `{}`, instance masks `{}`",
                entry.masked_surface, instance.masked_surface
            )));
        }
        Ok(entry
            .predictions
            .iter()
            .take(k)
            .enumerate()
            .map(|(i, p)| PredictionRecord {
                instance: instance.clone(),
                prediction: p.clone(),
                rank: i + 1,
            })
            .collect())
    }

    /// Reads one fixture file and merges it into the store.
    pub fn load_fixture(&mut self, path: &Path) -> Result<(), MlmError> {
        let text = std::fs::read_to_string(path).map_err(|source| MlmError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let doc: DocFixture = serde_json::from_str(&text)
            .map_err(|e| MlmError::Malformed(format!("{}: {e}", path.display())))?;
        for e in &doc.entries {
            if e.predictions.windows(2).any(|w| w[0].score < w[1].score)
                || e.predictions.iter().any(|p| !(0.0..=1.0).contains(&p.score))
            {
                return Err(MlmError::Malformed(format!(
                    "{}: entry s{}t{} has unordered or out-of-range scores",
                    path.display(),
                    e.sentence_index,
                    e.token_index
                )));
            }
        }
        let partial = doc.partial;
        let existing = self.docs.entry(doc.doc_id.clone()).or_insert_with(|| DocFixture {
            doc_id: doc.doc_id.clone(),
            ..DocFixture::default()
        });
        existing.partial |= partial;
        for e in doc.entries {
            let key = FixtureKey {
                doc_id: doc.doc_id.clone(),
                sentence_index: e.sentence_index,
                token_index: e.token_index,
                k: e.k,
            };
            if existing.entries.iter().any(|x| {
                (x.sentence_index, x.token_index, x.k) == (e.sentence_index, e.token_index, e.k)
            }) {
                return Err(MlmError::DuplicateKey(key));
            }
            existing.entries.push(e);
        }
        Ok(())
    }

    /// Loads every `*.json` file in `dir`, in name order.
    pub fn open(dir: &Path) -> Result<Self, MlmError> {
        let io = |source| MlmError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut store = FixtureStore::new();
        for p in paths {
            store.load_fixture(&p)?;
        }
        Ok(store)
    }

    /// Writes one file per document into `dir`. Entries are sorted so that
    /// the output does not depend on recording order.
    pub fn save(&self, dir: &Path) -> Result<(), MlmError> {
        let io = |source| MlmError::Io {
            path: dir.display().to_string(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(io)?;
        for doc in self.docs.values() {
            let mut doc = doc.clone();
            doc.entries
                .sort_by_key(|e| (e.sentence_index, e.token_index, e.k));
            let json = serde_json::to_string_pretty(&doc).expect("fixture serializes");
            std::fs::write(dir.join(format!("{}.json", file_stem(&doc.doc_id))), json + "\n")
                .map_err(io)?;
        }
        Ok(())
    }
}

impl MaskedLm for FixtureStore {
    fn get_predictions(
        &self,
        instance: &MaskedInstance,
        k: usize,
    ) -> Result<Vec<PredictionRecord>, MlmError> {
        check_k(k)?;
        self.lookup(instance, k)
    }
}
