//! Static word vectors and the term-matching rule built on them.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

use crate::nlp::Pipeline;

pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.85;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no vectors found")]
    Empty,
}

/// Word vectors keyed by lowercased word. All vectors share one dimension
/// and none is zero.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    dimension: usize,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    norms: Vec<f64>,
}

impl EmbeddingStore {
    /// Builds a store from in-memory vectors. Later duplicates of a word
    /// (after lowercasing) are ignored.
    pub fn from_vectors<I, S>(vectors: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: AsRef<str>,
    {
        let mut store = EmbeddingStore::default();
        for (i, (word, v)) in vectors.into_iter().enumerate() {
            store.insert(i + 1, word.as_ref(), &v)?;
        }
        if store.is_empty() {
            return Err(EmbeddingError::Empty);
        }
        Ok(store)
    }

    fn insert(&mut self, line: usize, word: &str, v: &[f32]) -> Result<(), EmbeddingError> {
        if self.index.is_empty() {
            self.dimension = v.len();
        }
        if v.len() != self.dimension || v.is_empty() {
            return Err(EmbeddingError::Dimension {
                line,
                expected: self.dimension,
                found: v.len(),
            });
        }
        let norm = v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(EmbeddingError::Parse {
                line,
                reason: format!("zero or non-finite vector for `{word}`"),
            });
        }
        let key = word.to_lowercase();
        if self.index.contains_key(&key) {
            return Ok(());
        }
        self.index.insert(key, self.norms.len());
        self.data.extend_from_slice(v);
        self.norms.push(norm);
        Ok(())
    }

    /// Reads the textual format: a word followed by its space-separated
    /// components on each line. A leading `count dimension` header line is
    /// skipped.
    pub fn load(path: &Path) -> Result<Self, EmbeddingError> {
        let io = |source| EmbeddingError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = std::fs::File::open(path).map_err(io)?;
        Self::read(std::io::BufReader::new(file)).map_err(|e| match e {
            EmbeddingError::Io { source, .. } => io(source),
            e => e,
        })
    }

    pub fn read(reader: impl BufRead) -> Result<Self, EmbeddingError> {
        let mut store = EmbeddingStore::default();
        let mut values = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| EmbeddingError::Io {
                path: String::new(),
                source,
            })?;
            let lineno = i + 1;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            values.clear();
            for f in fields {
                values.push(f.parse::<f32>().map_err(|e| EmbeddingError::Parse {
                    line: lineno,
                    reason: format!("`{f}`: {e}"),
                })?);
            }
            if lineno == 1 && values.len() == 1 && word.parse::<usize>().is_ok() {
                continue;
            }
            store.insert(lineno, word, &values)?;
        }
        if store.is_empty() {
            return Err(EmbeddingError::Empty);
        }
        Ok(store)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(&word.to_lowercase())
    }

    fn vector(&self, i: usize) -> &[f32] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    /// Cosine similarity, or `None` if either word has no vector.
    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        let i = *self.index.get(&a.to_lowercase())?;
        let j = *self.index.get(&b.to_lowercase())?;
        if i == j {
            return Some(1.0);
        }
        let dot: f64 = self
            .vector(i)
            .iter()
            .zip(self.vector(j))
            .map(|(&x, &y)| f64::from(x) * f64::from(y))
            .sum();
        Some((dot / (self.norms[i] * self.norms[j])).clamp(-1.0, 1.0))
    }

    /// Two terms match when they share a lemma or their vectors are at least
    /// `threshold` similar. Terms without vectors match on lemmas only.
    pub fn is_match(&self, a: &str, b: &str, threshold: f64) -> bool {
        same_lemma(a, b) || self.cosine(a, b).is_some_and(|c| c >= threshold)
    }
}

/// True when some reading of `a` and some reading of `b` lemmatize alike.
pub fn same_lemma(a: &str, b: &str) -> bool {
    if a.eq_ignore_ascii_case(b) {
        return true;
    }
    let lem = Pipeline::bundled().lemmatizer();
    let la = lem.candidate_lemmas(a);
    lem.candidate_lemmas(b).iter().any(|l| la.contains(l))
}
