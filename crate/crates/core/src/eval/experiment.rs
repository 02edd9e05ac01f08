//! Repeated withhold-and-predict runs over a set of documents.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embeddings::DEFAULT_MATCH_THRESHOLD;
use crate::ml::{Algorithm, CostMatrix, FilterModel, Preset};
use crate::mlm::MaskedLm;
use crate::nlp::AnnotatedDocument;
use crate::pipeline::{analyze, Assets, CorpusSource};

use super::baselines::{baseline1, baseline2, baseline3, SynonymLexicon, COMMON_RANGE, DEFAULT_K_TOP};
use super::metrics::{accuracy, coverage, filter_metrics, novel_terms, FilterMetrics, Score, TermSet};
use super::split::split_document;
use super::stats::{mean, median, vargha_delaney_a12, wilcoxon_rank_sum};
use super::EvalError;

pub const UNFILTERED: &str = "unfiltered";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Filter levels to apply; empty runs the unfiltered pipeline only.
    pub levels: Vec<Preset>,
    pub baselines: bool,
    pub k_top: usize,
    pub common_range: (usize, usize),
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k: 15,
            repetitions: 1,
            seed: 0,
            levels: Vec::new(),
            baselines: false,
            k_top: DEFAULT_K_TOP,
            common_range: COMMON_RANGE,
        }
    }
}

pub struct EvalContext<'a> {
    pub provider: &'a dyn MaskedLm,
    pub corpus: &'a dyn CorpusSource,
    pub assets: &'a Assets,
    /// One model per level in the config.
    pub filters: &'a BTreeMap<Preset, FilterModel>,
    pub synonyms: Option<&'a SynonymLexicon>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScores {
    pub terms: Vec<String>,
    pub accuracy: Score,
    pub coverage: Score,
}

impl TermScores {
    fn new(d: &TermSet, n: &TermSet, assets: &Assets) -> Self {
        TermScores {
            terms: d.iter().cloned().collect(),
            accuracy: accuracy(d, n, &assets.store),
            coverage: coverage(d, n, &assets.store),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostFilter {
    pub scores: TermScores,
    pub filter: FilterMetrics,
}

/// One (document, repetition, level) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub doc_id: String,
    pub repetition: usize,
    pub split_seed: u64,
    pub k: usize,
    pub level: String,
    pub disclosed_sentences: usize,
    pub withheld_sentences: usize,
    pub novel_terms: Vec<String>,
    pub pre: TermScores,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<PostFilter>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub doc_id: String,
    pub repetition: usize,
    pub baseline: String,
    pub hits: Vec<String>,
    pub scores: TermScores,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub doc_id: String,
    pub repetition: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub series: String,
    pub metric: String,
    pub runs: usize,
    pub mean: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub metric: String,
    pub a: String,
    pub b: String,
    pub p_value: f64,
    pub a12: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterEcho {
    pub algorithm: Algorithm,
    pub sampling_ratio: Option<f64>,
    pub cost: Option<CostMatrix>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
    pub documents: Vec<String>,
    pub common_cutoff: usize,
    pub match_threshold: f64,
    pub embeddings: usize,
    pub filters: BTreeMap<String, FilterEcho>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ConfigEcho,
    pub records: Vec<EvalRecord>,
    pub baselines: Vec<BaselineRecord>,
    pub failures: Vec<Failure>,
    pub summaries: Vec<Summary>,
    pub comparisons: Vec<Comparison>,
}

/// Split seed of a (document, repetition), independent of document order.
pub fn split_seed(seed: u64, doc_id: &str, repetition: usize) -> u64 {
    let d = Sha256::digest(format!("{seed}/{doc_id}/{repetition}").as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("eight bytes"))
}

struct DocOutcome {
    records: Vec<EvalRecord>,
    baselines: Vec<BaselineRecord>,
    failures: Vec<Failure>,
}

fn run_once(
    doc: &AnnotatedDocument,
    repetition: usize,
    config: &ExperimentConfig,
    ctx: &EvalContext<'_>,
    out: &mut DocOutcome,
) -> Result<(), EvalError> {
    let seed = split_seed(config.seed, &doc.doc_id, repetition);
    let split = split_document(doc, seed)?;
    let disclosed = split.disclosed_doc(doc);
    let withheld = split.withheld_doc(doc);
    let assets = ctx.assets;
    let analysis = analyze(&disclosed, ctx.provider, config.k, ctx.corpus, assets)?;

    let x = &disclosed.term_set;
    let excluded = assets.lists.excluded(assets.common_cutoff);
    let n = novel_terms(x, &withheld.term_set, &excluded);
    let pre = TermScores::new(&analysis.terms(), &n, assets);
    let actual: Vec<bool> = analysis
        .lemmas
        .iter()
        .map(|l| n.iter().any(|t| assets.store.is_match(l, t, DEFAULT_MATCH_THRESHOLD)))
        .collect();

    let record = |level: String, post: Option<PostFilter>| EvalRecord {
        doc_id: doc.doc_id.clone(),
        repetition,
        split_seed: seed,
        k: config.k,
        level,
        disclosed_sentences: split.disclosed.len(),
        withheld_sentences: split.withheld.len(),
        novel_terms: n.iter().cloned().collect(),
        pre: pre.clone(),
        post,
    };
    let mut records = Vec::new();
    if config.levels.is_empty() {
        records.push(record("none".into(), None));
    }
    for level in &config.levels {
        let model = ctx
            .filters
            .get(level)
            .ok_or_else(|| EvalError::MissingFilter(level.to_string()))?;
        let labels = model.classify_matrix(&analysis.matrix)?;
        let predicted: Vec<bool> = labels.iter().map(|l| l.is_relevant()).collect();
        let post = PostFilter {
            scores: TermScores::new(&analysis.filtered_terms(&labels), &n, assets),
            filter: filter_metrics(&actual, &predicted),
        };
        records.push(record(level.to_string(), Some(post)));
    }

    let mut baselines = Vec::new();
    if config.baselines {
        let y = &withheld.term_set;
        let mut results = vec![
            ("baseline1", baseline1(x, y, &assets.lists, config.common_range)),
            ("baseline2", baseline2(&analysis.corpus, config.k_top, x, y, &assets.lists)),
        ];
        if let Some(lex) = ctx.synonyms {
            results.push(("baseline3", baseline3(x, y, lex, &assets.lists)));
        }
        for (name, r) in results {
            baselines.push(BaselineRecord {
                doc_id: doc.doc_id.clone(),
                repetition,
                baseline: name.into(),
                hits: r.hits.iter().cloned().collect(),
                scores: TermScores::new(&r.candidates, &n, assets),
                warning: r.warning,
            });
        }
    }
    out.records.extend(records);
    out.baselines.extend(baselines);
    Ok(())
}

fn run_document(doc: &AnnotatedDocument, config: &ExperimentConfig, ctx: &EvalContext<'_>) -> DocOutcome {
    let mut out = DocOutcome {
        records: Vec::new(),
        baselines: Vec::new(),
        failures: Vec::new(),
    };
    for rep in 0..config.repetitions {
        if let Err(e) = run_once(doc, rep, config, ctx, &mut out) {
            log::warn!("{} repetition {rep}: {e}", doc.doc_id);
            out.failures.push(Failure {
                doc_id: doc.doc_id.clone(),
                repetition: rep,
                error: e.to_string(),
            });
        }
    }
    out
}

fn summaries_and_comparisons(records: &[EvalRecord], baselines: &[BaselineRecord]) -> (Vec<Summary>, Vec<Comparison>) {
    // series name -> metric -> values, in run order
    let mut series: BTreeMap<String, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    let mut push = |name: &str, s: &TermScores| {
        let e = series.entry(name.to_string()).or_default();
        e.entry("accuracy").or_default().push(s.accuracy.value);
        e.entry("coverage").or_default().push(s.coverage.value);
    };
    let first_level = records.first().map(|r| r.level.clone());
    for r in records {
        if Some(&r.level) == first_level.as_ref() {
            push(UNFILTERED, &r.pre);
        }
        if let Some(p) = &r.post {
            push(&r.level, &p.scores);
        }
    }
    for b in baselines {
        push(&b.baseline, &b.scores);
    }

    let mut summaries = Vec::new();
    for (name, metrics) in &series {
        for (metric, v) in metrics {
            summaries.push(Summary {
                series: name.clone(),
                metric: metric.to_string(),
                runs: v.len(),
                mean: mean(v),
                median: median(v),
            });
        }
    }
    let mut comparisons = Vec::new();
    if let Some(base) = series.get(UNFILTERED) {
        for (name, metrics) in &series {
            if name == UNFILTERED {
                continue;
            }
            // filtered levels against the unfiltered run; the pipeline against baselines
            let (a, b, av, bv) = if name.starts_with("baseline") {
                (UNFILTERED, name.as_str(), base, metrics)
            } else {
                (name.as_str(), UNFILTERED, metrics, base)
            };
            for metric in ["accuracy", "coverage"] {
                let (Some(x), Some(y)) = (av.get(metric), bv.get(metric)) else {
                    continue;
                };
                if x.is_empty() || y.is_empty() {
                    continue;
                }
                comparisons.push(Comparison {
                    metric: metric.into(),
                    a: a.into(),
                    b: b.into(),
                    p_value: wilcoxon_rank_sum(x, y),
                    a12: vargha_delaney_a12(x, y),
                });
            }
        }
    }
    (summaries, comparisons)
}

/// Documents run in parallel; the report lists them in input order.
pub fn run_experiment(documents: &[AnnotatedDocument], config: &ExperimentConfig, ctx: &EvalContext<'_>) -> EvalReport {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).clamp(1, documents.len().max(1));
    let chunk = documents.len().div_ceil(workers).max(1);
    let outcomes: Vec<DocOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = documents
            .chunks(chunk)
            .map(|docs| s.spawn(move || docs.iter().map(|d| run_document(d, config, ctx)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("document worker panicked"))
            .collect()
    });

    let mut records = Vec::new();
    let mut baselines = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        records.extend(o.records);
        baselines.extend(o.baselines);
        failures.extend(o.failures);
    }
    let (summaries, comparisons) = summaries_and_comparisons(&records, &baselines);
    let filters = config
        .levels
        .iter()
        .filter_map(|l| {
            ctx.filters.get(l).map(|m| {
                (
                    l.to_string(),
                    FilterEcho {
                        algorithm: m.algorithm,
                        sampling_ratio: m.config.sampling_ratio,
                        cost: m.config.cost,
                        seed: m.config.seed,
                    },
                )
            })
        })
        .collect();
    EvalReport {
        config: ConfigEcho {
            experiment: config.clone(),
            documents: documents.iter().map(|d| d.doc_id.clone()).collect(),
            common_cutoff: ctx.assets.common_cutoff,
            match_threshold: DEFAULT_MATCH_THRESHOLD,
            embeddings: ctx.assets.store.len(),
            filters,
        },
        records,
        baselines,
        failures,
        summaries,
        comparisons,
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Flat export: one row per record and one per baseline run.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "doc_id",
            "repetition",
            "series",
            "novel_terms",
            "terms",
            "accuracy",
            "coverage",
            "filter_accuracy",
            "filter_precision",
            "filter_recall",
        ])?;
        let mut row = |doc: &str, rep: usize, series: &str, novel: usize, s: &TermScores, f: Option<&FilterMetrics>| {
            w.write_record([
                doc.to_string(),
                rep.to_string(),
                series.to_string(),
                novel.to_string(),
                s.terms.len().to_string(),
                num(s.accuracy.value),
                num(s.coverage.value),
                f.map_or(String::new(), |f| num(f.accuracy)),
                f.map_or(String::new(), |f| num(f.precision)),
                f.map_or(String::new(), |f| num(f.recall)),
            ])
        };
        let first_level = self.records.first().map(|r| r.level.clone());
        for r in &self.records {
            if Some(&r.level) == first_level.as_ref() {
                row(&r.doc_id, r.repetition, UNFILTERED, r.novel_terms.len(), &r.pre, None)?;
            }
            if let Some(p) = &r.post {
                row(&r.doc_id, r.repetition, &r.level, r.novel_terms.len(), &p.scores, Some(&p.filter))?;
            }
        }
        let novel: BTreeMap<(&str, usize), usize> = self
            .records
            .iter()
            .map(|r| ((r.doc_id.as_str(), r.repetition), r.novel_terms.len()))
            .collect();
        for b in &self.baselines {
            let n = novel.get(&(b.doc_id.as_str(), b.repetition)).copied().unwrap_or(0);
            row(&b.doc_id, b.repetition, &b.baseline, n, &b.scores, None)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-series value lists for box plots, keyed `metric/series`.
    pub fn plot_series(&self) -> BTreeMap<String, Vec<f64>> {
        let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut push = |series: &str, s: &TermScores| {
            out.entry(format!("accuracy/{series}")).or_default().push(s.accuracy.value);
            out.entry(format!("coverage/{series}")).or_default().push(s.coverage.value);
        };
        let first_level = self.records.first().map(|r| r.level.clone());
        for r in &self.records {
            if Some(&r.level) == first_level.as_ref() {
                push(UNFILTERED, &r.pre);
            }
            if let Some(p) = &r.post {
                push(&r.level, &p.scores);
            }
        }
        for b in &self.baselines {
            push(&b.baseline, &b.scores);
        }
        out
    }
}
