//! The thirteen per-prediction features used by the relevance filter.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::DomainCorpus;
use crate::embeddings::EmbeddingStore;
use crate::mlm::PredictionRecord;
use crate::nlp::{AnnotatedDocument, Pipeline, PosTag, WordClass};

pub const BUCKETS: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Relevant,
    NonRelevant,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Relevant => "relevant",
            Label::NonRelevant => "non-relevant",
        }
    }

    pub fn is_relevant(self) -> bool {
        self == Label::Relevant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Class of the masked word.
    pub f1: WordClass,
    /// Tag of the prediction in place of the masked word.
    pub f2: PosTag,
    /// `f2` has the class `f1`.
    pub f3: bool,
    pub f4: usize,
    pub f5: usize,
    pub f6: f64,
    /// Model score.
    pub f7: f64,
    pub f8: usize,
    /// Cosine similarity; `None` when either word lacks a vector.
    pub f9: Option<f64>,
    /// Frequency bucket among this document's predictions, 0 = most frequent.
    pub f10: u8,
    /// Frequency bucket in the domain corpus.
    pub f11: u8,
    pub f12: f64,
    pub f13: f64,
    pub label: Option<Label>,
}

/// Identifies the row a vector came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSource {
    pub doc_id: String,
    pub sentence_index: usize,
    pub token_index: usize,
    pub masked: String,
    pub prediction: String,
    pub lemma: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Nominal,
    Numeric,
    Ordinal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    /// Allowed values of a nominal column, or the range of an ordinal one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    /// Whether the column may be undefined (written as `?`).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub optional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<Column>,
    pub fingerprint: String,
}

impl Schema {
    pub fn table1() -> Self {
        let nominal = |name: &str, values: Vec<String>| Column {
            name: name.into(),
            kind: ColumnKind::Nominal,
            values,
            optional: false,
        };
        let numeric = |name: &str| Column {
            name: name.into(),
            kind: ColumnKind::Numeric,
            values: Vec::new(),
            optional: false,
        };
        let ordinal = |name: &str| Column {
            name: name.into(),
            kind: ColumnKind::Ordinal,
            values: (0..BUCKETS).map(|b| b.to_string()).collect(),
            optional: false,
        };
        let columns = vec![
            nominal("f1", vec!["noun".into(), "verb".into()]),
            nominal("f2", PosTag::ALL.iter().map(|t| t.as_str().to_string()).collect()),
            nominal("f3", vec!["false".into(), "true".into()]),
            numeric("f4"),
            numeric("f5"),
            numeric("f6"),
            numeric("f7"),
            numeric("f8"),
            Column {
                optional: true,
                ..numeric("f9")
            },
            ordinal("f10"),
            ordinal("f11"),
            numeric("f12"),
            numeric("f13"),
        ];
        let digest = Sha256::digest(serde_json::to_vec(&columns).expect("columns serialize"));
        Schema {
            columns,
            fingerprint: hex::encode(digest),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub schema: Schema,
    pub rows: Vec<FeatureVector>,
    pub sources: Vec<RowSource>,
    pub doc_id: String,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

/// F1 to F3: the masked word's class, the prediction's tag in context, and
/// whether the tag belongs to that class.
pub fn pos_features(record: &PredictionRecord, doc: &AnnotatedDocument) -> (WordClass, PosTag, bool, String) {
    let inst = &record.instance;
    let nlp = Pipeline::bundled();
    let (tag, lemma) = match doc.sentence(inst.sentence_index) {
        Some(s) if inst.token_index < s.tokens.len() => {
            nlp.retag_substituted(s, inst.token_index, &record.prediction.token)
        }
        _ => {
            let tag = nlp.tagger().tag(&[record.prediction.token.as_str()])[0];
            (tag, nlp.lemmatize(&record.prediction.token, tag))
        }
    };
    (inst.masked_pos, tag, tag.word_class() == Some(inst.masked_pos), lemma)
}

/// F4 to F6: character lengths and their min/max ratio (0 if both empty).
pub fn length_features(masked: &str, prediction: &str) -> (usize, usize, f64) {
    let (a, b) = (masked.chars().count(), prediction.chars().count());
    let ratio = if a.max(b) == 0 {
        0.0
    } else {
        a.min(b) as f64 / a.max(b) as f64
    };
    (a, b, ratio)
}

/// Unit-cost Levenshtein distance over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// F8, compared case-insensitively so that sentence-initial capitals do not count.
pub fn edit_distance(masked: &str, prediction: &str) -> usize {
    levenshtein(&masked.to_lowercase(), &prediction.to_lowercase())
}

pub fn semantic_similarity(masked: &str, prediction: &str, store: &EmbeddingStore) -> Option<f64> {
    store.cosine(masked, prediction)
}

/// Decile of every lemma in `counts`: lemmas sorted by descending count,
/// ties by lemma, rank r of n lands in bucket floor(10 r / n).
#[derive(Debug, Clone, Default)]
pub struct QuantileBuckets {
    buckets: HashMap<String, u8>,
}

impl QuantileBuckets {
    pub fn new(counts: &BTreeMap<String, usize>) -> Self {
        let mut ranked: Vec<(&String, usize)> = counts.iter().map(|(k, &v)| (k, v)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let n = ranked.len();
        let buckets = ranked
            .into_iter()
            .enumerate()
            .map(|(r, (k, _))| {
                let b = (usize::from(BUCKETS) * r / n).min(usize::from(BUCKETS) - 1);
                (k.clone(), b as u8)
            })
            .collect();
        QuantileBuckets { buckets }
    }

    /// Absent lemmas are treated as least frequent.
    pub fn bucket(&self, lemma: &str) -> u8 {
        self.buckets.get(lemma).copied().unwrap_or(BUCKETS - 1)
    }
}

pub fn quantile_bucket(counts: &BTreeMap<String, usize>, lemma: &str) -> u8 {
    QuantileBuckets::new(counts).bucket(lemma)
}

/// F12 and F13, plus whether the corpus was empty.
pub fn tfidf_features(corpus: &DomainCorpus, lemma: &str) -> (f64, f64, bool) {
    let (mean, max) = corpus.tfidf_features(lemma);
    (mean, max, corpus.articles.is_empty())
}

/// One row per record. F10 counts are taken over `records` themselves, so
/// pass every surviving prediction of the document at once.
pub fn build_matrix(
    records: &[PredictionRecord],
    doc: &AnnotatedDocument,
    corpus: &DomainCorpus,
    store: &EmbeddingStore,
) -> FeatureMatrix {
    let pos: Vec<_> = records.iter().map(|r| pos_features(r, doc)).collect();
    let mut prediction_counts: BTreeMap<String, usize> = BTreeMap::new();
    for p in &pos {
        *prediction_counts.entry(p.3.clone()).or_insert(0) += 1;
    }
    let f10 = QuantileBuckets::new(&prediction_counts);
    let f11 = QuantileBuckets::new(&corpus.term_stats);

    let mut warnings = Vec::new();
    if corpus.articles.is_empty() && !records.is_empty() {
        warnings.push("domain corpus is empty; f11 = 9 and f12 = f13 = 0 for every row".into());
    }

    let mut rows = Vec::with_capacity(records.len());
    let mut sources = Vec::with_capacity(records.len());
    for (r, (f1, f2, f3, lemma)) in records.iter().zip(pos) {
        let masked = &r.instance.masked_surface;
        let token = &r.prediction.token;
        let (f4, f5, f6) = length_features(masked, token);
        let (f12, f13) = corpus.tfidf_features(&lemma);
        rows.push(FeatureVector {
            f1,
            f2,
            f3,
            f4,
            f5,
            f6,
            f7: r.prediction.score,
            f8: edit_distance(masked, token),
            f9: semantic_similarity(masked, token, store),
            f10: f10.bucket(&lemma),
            f11: f11.bucket(&lemma),
            f12,
            f13,
            label: None,
        });
        sources.push(RowSource {
            doc_id: r.instance.doc_id.clone(),
            sentence_index: r.instance.sentence_index,
            token_index: r.instance.token_index,
            masked: masked.clone(),
            prediction: token.clone(),
            lemma,
        });
    }
    FeatureMatrix {
        schema: Schema::table1(),
        rows,
        sources,
        doc_id: doc.doc_id.clone(),
        seed: None,
        warnings,
    }
}

/// Shortest decimal that reads back to the same value.
fn num(x: f64) -> String {
    format!("{x:?}")
}

impl FeatureMatrix {
    pub fn empty(doc_id: &str) -> Self {
        FeatureMatrix {
            schema: Schema::table1(),
            rows: Vec::new(),
            sources: Vec::new(),
            doc_id: doc_id.to_string(),
            seed: None,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends the rows of `other`. Both must share a schema.
    pub fn extend(&mut self, other: FeatureMatrix) {
        assert_eq!(self.schema.fingerprint, other.schema.fingerprint);
        self.rows.extend(other.rows);
        self.sources.extend(other.sources);
        self.warnings.extend(other.warnings);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["doc_id", "sentence", "token", "masked", "prediction"];
        header.extend(self.schema.columns.iter().map(|c| c.name.as_str()));
        header.push("label");
        w.write_record(&header)?;
        for (v, s) in self.rows.iter().zip(&self.sources) {
            w.write_record([
                s.doc_id.clone(),
                s.sentence_index.to_string(),
                s.token_index.to_string(),
                s.masked.clone(),
                s.prediction.clone(),
                v.f1.as_str().to_string(),
                v.f2.as_str().to_string(),
                v.f3.to_string(),
                v.f4.to_string(),
                v.f5.to_string(),
                num(v.f6),
                num(v.f7),
                v.f8.to_string(),
                v.f9.map_or_else(|| "?".to_string(), num),
                v.f10.to_string(),
                v.f11.to_string(),
                num(v.f12),
                num(v.f13),
                v.label.map_or("?", Label::as_str).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn schema_json(&self) -> String {
        serde_json::to_string_pretty(&self.schema).expect("schema serializes") + "\n"
    }
}
