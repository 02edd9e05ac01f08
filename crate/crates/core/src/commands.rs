//! The operator commands behind the `reqcomp` binary. Each reads its inputs
//! from a [`RunConfig`], writes its artifacts, and fails with a
//! [`CommandError`] whose class decides the process exit code.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{extract_keyphrases, mine, CorpusError, DomainCorpus, MineLimits, WikiClient, WikiConfig, WIKIPEDIA_API};
use crate::embeddings::{EmbeddingError, EmbeddingStore};
use crate::eval::experiment::split_seed;
use crate::eval::{
    accuracy, baseline1, baseline2, baseline3, coverage, novel_terms, run_experiment, split_document, EvalContext,
    EvalError, EvalReport, ExperimentConfig, Score, SynonymLexicon, TermSet,
};
use crate::features::{FeatureVector, Label, RowSource};
use crate::ml::{info_gain_ranking, label_dataset, load_model, preset, train, Algorithm, FilterModel, LabeledDataset, MlError, Params, Preset};
use crate::mlm::{check_k, FixtureStore, HttpProvider, MaskedLm, MlmError};
use crate::nlp::{AnnotatedDocument, Pipeline};
use crate::pipeline::{analyze, Analysis, Assets, CorpusSource, MinedCorpus, NoCorpus, PipelineError};
use crate::prune::DEFAULT_COMMON_CUTOFF;
use crate::words::{WordListError, WordLists};

pub const DEFAULT_OUT: &str = "reqcomp-out";

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Network(String),
    #[error("{0}")]
    Provider(String),
    #[error("{0}")]
    Internal(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Network(_) => 3,
            CommandError::Provider(_) => 4,
            CommandError::Internal(_) => 5,
        }
    }
}

impl From<MlmError> for CommandError {
    fn from(e: MlmError) -> Self {
        let msg = e.to_string();
        match e {
            MlmError::InvalidK(_) | MlmError::Io { .. } | MlmError::DuplicateKey(_) => CommandError::Config(msg),
            MlmError::Unreachable { .. } | MlmError::Rejected { .. } | MlmError::Malformed(_) | MlmError::FixtureMiss(_) => {
                CommandError::Provider(msg)
            }
            MlmError::MaskCount { .. } | MlmError::Mask(_) => CommandError::Internal(msg),
        }
    }
}

impl From<CorpusError> for CommandError {
    fn from(e: CorpusError) -> Self {
        let msg = e.to_string();
        match e {
            CorpusError::Network { .. } | CorpusError::Api(_) => CommandError::Network(msg),
            CorpusError::Io { .. } | CorpusError::Manifest(_) => CommandError::Config(msg),
        }
    }
}

impl From<MlError> for CommandError {
    fn from(e: MlError) -> Self {
        match e {
            MlError::Io { .. } => CommandError::Internal(e.to_string()),
            _ => CommandError::Config(e.to_string()),
        }
    }
}

impl From<PipelineError> for CommandError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Mlm(e) => e.into(),
            PipelineError::Corpus(e) => e.into(),
            PipelineError::Ml(e) => e.into(),
        }
    }
}

impl From<EvalError> for CommandError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Pipeline(e) => e.into(),
            EvalError::Ml(e) => e.into(),
            e => CommandError::Config(e.to_string()),
        }
    }
}

impl From<EmbeddingError> for CommandError {
    fn from(e: EmbeddingError) -> Self {
        CommandError::Config(format!("embeddings: {e}"))
    }
}

impl From<WordListError> for CommandError {
    fn from(e: WordListError) -> Self {
        CommandError::Config(format!("word list: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderSource {
    Url(String),
    /// A fixture file or a directory of them.
    Fixture(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub provider: Option<ProviderSource>,
    pub k: usize,
    pub preset: Option<Preset>,
    /// A corpus saved by `mine`: either one corpus, or one subdirectory per
    /// document id.
    pub corpus_dir: Option<PathBuf>,
    /// MediaWiki endpoint to mine from when no corpus directory is given.
    pub wiki_url: Option<String>,
    pub cache_dir: Option<PathBuf>,
    /// Request rate toward the MediaWiki endpoint; 0 disables throttling.
    pub wiki_rate: f64,
    pub depth: usize,
    pub embeddings: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub common_words: Option<PathBuf>,
    pub stop_words: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            provider: None,
            k: 15,
            preset: None,
            corpus_dir: None,
            wiki_url: None,
            cache_dir: None,
            wiki_rate: WikiConfig::default().requests_per_second,
            depth: 0,
            embeddings: None,
            model: None,
            common_words: None,
            stop_words: None,
            synonyms: None,
            seed: 0,
            out: None,
        }
    }
}

impl RunConfig {
    fn out_dir(&self) -> Result<PathBuf, CommandError> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        std::fs::create_dir_all(&dir).map_err(|e| CommandError::Internal(format!("{}: {e}", dir.display())))?;
        Ok(dir)
    }

    fn assets(&self) -> Result<Assets, CommandError> {
        let lists = WordLists::load(self.common_words.as_deref(), self.stop_words.as_deref(), None)?;
        let store = match &self.embeddings {
            Some(p) => EmbeddingStore::load(p)?,
            None => EmbeddingStore::default(),
        };
        Ok(Assets {
            lists,
            store,
            common_cutoff: DEFAULT_COMMON_CUTOFF,
        })
    }

    fn provider(&self) -> Result<Box<dyn MaskedLm>, CommandError> {
        check_k(self.k)?;
        match &self.provider {
            Some(ProviderSource::Url(url)) => Ok(Box::new(HttpProvider::new(url))),
            Some(ProviderSource::Fixture(path)) if path.is_dir() => Ok(Box::new(FixtureStore::open(path)?)),
            Some(ProviderSource::Fixture(path)) => {
                let mut store = FixtureStore::new();
                store.load_fixture(path)?;
                Ok(Box::new(store))
            }
            None => Err(CommandError::Config("no prediction provider: pass --provider-url or --fixture".into())),
        }
    }

    fn wiki_client(&self) -> WikiClient {
        WikiClient::new(WikiConfig {
            endpoint: self.wiki_url.clone().unwrap_or_else(|| WIKIPEDIA_API.to_string()),
            cache_dir: self.cache_dir.clone(),
            requests_per_second: self.wiki_rate,
            ..WikiConfig::default()
        })
    }

    /// `split` marks callers that analyze a disclosed half, for which a
    /// corpus mined from the whole document would leak withheld text.
    fn corpus_source(&self, split: bool) -> Box<dyn CorpusSource> {
        if let Some(dir) = &self.corpus_dir {
            if split {
                log::warn!("corpus from {} was not mined from the disclosed half alone", dir.display());
            }
            Box::new(DirCorpus(dir.clone()))
        } else if self.wiki_url.is_some() {
            Box::new(MinedCorpus {
                client: self.wiki_client(),
                depth: self.depth,
                limits: MineLimits::default(),
            })
        } else {
            Box::new(NoCorpus)
        }
    }

    fn filter(&self) -> Result<Option<FilterModel>, CommandError> {
        let Some(path) = &self.model else {
            return match self.preset {
                Some(p) => Err(CommandError::Config(format!("preset `{p}` needs a trained model (--model)"))),
                None => Ok(None),
            };
        };
        let model = load_model(path).map_err(|e| CommandError::Config(format!("{}: {e}", path.display())))?;
        if let Some(p) = self.preset {
            if p.algorithm() != model.algorithm {
                return Err(CommandError::Config(format!(
                    "{} holds a {} model, preset `{p}` uses {}",
                    path.display(),
                    model.algorithm,
                    p.algorithm()
                )));
            }
        }
        Ok(Some(model))
    }

    fn synonym_lexicon(&self) -> Result<Option<SynonymLexicon>, CommandError> {
        self.synonyms.as_deref().map(SynonymLexicon::load).transpose().map_err(Into::into)
    }
}

/// Saved corpora: `dir/<doc_id>/` when present, else `dir` itself.
struct DirCorpus(PathBuf);

impl CorpusSource for DirCorpus {
    fn corpus_for(&self, doc: &AnnotatedDocument) -> Result<DomainCorpus, CorpusError> {
        let own = self.0.join(&doc.doc_id);
        if own.join("manifest.json").is_file() {
            DomainCorpus::load(&own)
        } else {
            DomainCorpus::load(&self.0)
        }
    }
}

/// Reads and annotates every input; the document id is the file stem.
pub fn load_documents(paths: &[PathBuf]) -> Result<Vec<AnnotatedDocument>, CommandError> {
    if paths.is_empty() {
        return Err(CommandError::Config("no input documents".into()));
    }
    let mut seen = BTreeSet::new();
    let mut docs = Vec::with_capacity(paths.len());
    for p in paths {
        let text = std::fs::read_to_string(p).map_err(|e| CommandError::Config(format!("{}: {e}", p.display())))?;
        let id = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| CommandError::Config(format!("{}: not a file", p.display())))?;
        if !seen.insert(id.clone()) {
            return Err(CommandError::Config(format!("two inputs share the document id `{id}`")));
        }
        docs.push(Pipeline::bundled().annotate(&id, &text));
    }
    Ok(docs)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CommandError> {
    std::fs::write(path, contents).map_err(|e| CommandError::Internal(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    #[serde(flatten)]
    pub source: RowSource,
    pub rank: usize,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub term: String,
    /// Highest model score among the predictions of this term.
    pub score: f64,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecommendReport {
    pub doc_id: String,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<Algorithm>,
    pub masks: usize,
    pub predictions: usize,
    pub kept: usize,
    pub terms: Vec<Recommendation>,
    pub warnings: Vec<String>,
}

impl RecommendReport {
    pub fn term_set(&self) -> TermSet {
        self.terms.iter().map(|r| r.term.clone()).collect()
    }
}

fn recommendations(analysis: &Analysis, labels: Option<&[Label]>) -> Vec<Recommendation> {
    let mut by_term: BTreeMap<&str, Recommendation> = BTreeMap::new();
    for (i, lemma) in analysis.lemmas.iter().enumerate() {
        if labels.is_some_and(|l| !l[i].is_relevant()) {
            continue;
        }
        let record = &analysis.kept[i];
        let entry = by_term.entry(lemma).or_insert_with(|| Recommendation {
            term: lemma.clone(),
            score: 0.0,
            evidence: Vec::new(),
        });
        entry.score = entry.score.max(record.prediction.score);
        entry.evidence.push(Evidence {
            source: analysis.matrix.sources[i].clone(),
            rank: record.rank,
            features: analysis.matrix.rows[i].clone(),
        });
    }
    let mut out: Vec<Recommendation> = by_term.into_values().collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
    out
}

/// Runs the whole pipeline on each full input document. Writes
/// `<out>/<doc_id>.recommend.json` when an output directory is set.
pub fn cmd_recommend(config: &RunConfig) -> Result<Vec<RecommendReport>, CommandError> {
    let docs = load_documents(&config.inputs)?;
    let provider = config.provider()?;
    let assets = config.assets()?;
    let corpus = config.corpus_source(false);
    let filter = config.filter()?;
    let mut reports = Vec::with_capacity(docs.len());
    for doc in &docs {
        let analysis = analyze(doc, provider.as_ref(), config.k, corpus.as_ref(), &assets)?;
        let labels = filter.as_ref().map(|m| m.classify_matrix(&analysis.matrix)).transpose()?;
        reports.push(RecommendReport {
            doc_id: doc.doc_id.clone(),
            k: config.k,
            filter: filter.as_ref().map(|m| m.algorithm),
            masks: analysis.masks,
            predictions: analysis.raw_predictions,
            kept: analysis.kept.len(),
            terms: recommendations(&analysis, labels.as_deref()),
            warnings: analysis.matrix.warnings.clone(),
        });
    }
    if let Some(dir) = &config.out {
        std::fs::create_dir_all(dir).map_err(|e| CommandError::Internal(format!("{}: {e}", dir.display())))?;
        for r in &reports {
            write(&dir.join(format!("{}.recommend.json", r.doc_id)), json(r))?;
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MineSummary {
    pub doc_id: String,
    pub keyphrases: usize,
    pub articles: usize,
    pub directory: PathBuf,
}

/// Mines one corpus per input into `<corpus-dir or out>/<doc_id>/`.
pub fn cmd_mine(config: &RunConfig) -> Result<Vec<MineSummary>, CommandError> {
    let docs = load_documents(&config.inputs)?;
    let root = match &config.corpus_dir {
        Some(d) => d.clone(),
        None => config.out_dir()?,
    };
    let client = config.wiki_client();
    let mut out = Vec::new();
    for doc in &docs {
        let keyphrases = extract_keyphrases(doc);
        let corpus = mine(&client, &keyphrases, config.depth, &MineLimits::default())?;
        let dir = root.join(&doc.doc_id);
        corpus.save(&dir)?;
        out.push(MineSummary {
            doc_id: doc.doc_id.clone(),
            keyphrases: keyphrases.len(),
            articles: corpus.articles.len(),
            directory: dir,
        });
    }
    log::info!("{} network request(s), {} cache hit(s)", client.network_requests(), client.cache_hits());
    Ok(out)
}

/// Labels the predictions made from each document's disclosed half against
/// the terms only its withheld half contains.
pub fn labeled_split(
    doc: &AnnotatedDocument,
    seed: u64,
    provider: &dyn MaskedLm,
    k: usize,
    corpus: &dyn CorpusSource,
    assets: &Assets,
) -> Result<LabeledDataset, CommandError> {
    let split = split_document(doc, split_seed(seed, &doc.doc_id, 0))?;
    let disclosed = split.disclosed_doc(doc);
    let withheld = split.withheld_doc(doc);
    let analysis = analyze(&disclosed, provider, k, corpus, assets)?;
    let excluded = assets.lists.excluded(assets.common_cutoff);
    let n = novel_terms(&disclosed.term_set, &withheld.term_set, &excluded);
    Ok(label_dataset(analysis.matrix, &n, &assets.store))
}

#[derive(Debug, Clone, Default)]
pub struct TrainOptions {
    /// Used when no preset is given.
    pub algorithm: Option<Algorithm>,
    pub params: Option<Params>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainSummary {
    pub model: PathBuf,
    pub algorithm: Algorithm,
    pub relevant: usize,
    pub non_relevant: usize,
}

/// Trains a filter on labeled splits of the inputs. Writes the model
/// (`--model`, else `<out>/model.json`), `training.csv` and `info_gain.json`.
pub fn cmd_train(config: &RunConfig, options: &TrainOptions) -> Result<TrainSummary, CommandError> {
    let docs = load_documents(&config.inputs)?;
    let provider = config.provider()?;
    let assets = config.assets()?;
    let corpus = config.corpus_source(true);
    let parts = docs
        .iter()
        .map(|d| labeled_split(d, config.seed, provider.as_ref(), config.k, corpus.as_ref(), &assets))
        .collect::<Result<Vec<_>, _>>()?;
    let dataset = LabeledDataset::merge(parts)?;
    let model = match (config.preset, options.algorithm) {
        (Some(p), _) => preset(p, &dataset, options.params.as_ref(), config.seed)?,
        (None, Some(a)) => train(a, &dataset, &options.params.clone().unwrap_or_default(), None, config.seed)?,
        (None, None) => return Err(CommandError::Config("train needs --preset or --algorithm".into())),
    };
    let out = config.out_dir()?;
    let path = config.model.clone().unwrap_or_else(|| out.join("model.json"));
    model.save(&path)?;
    let mut csv = Vec::new();
    dataset
        .matrix
        .write_csv(&mut csv)
        .map_err(|e| CommandError::Internal(format!("training.csv: {e}")))?;
    write(&out.join("training.csv"), csv)?;
    write(&out.join("info_gain.json"), json(&info_gain_ranking(&dataset)))?;
    Ok(TrainSummary {
        model: path,
        algorithm: model.algorithm,
        relevant: dataset.relevant,
        non_relevant: dataset.non_relevant,
    })
}

#[derive(Debug, Clone)]
pub struct EvaluateOptions {
    pub repetitions: usize,
    pub baselines: bool,
    pub k_top: usize,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        let d = ExperimentConfig::default();
        EvaluateOptions {
            repetitions: d.repetitions,
            baselines: d.baselines,
            k_top: d.k_top,
        }
    }
}

/// Runs the split experiment; writes `report.json`, `report.csv` and
/// `plots.json` into the output directory.
pub fn cmd_evaluate(config: &RunConfig, options: &EvaluateOptions) -> Result<EvalReport, CommandError> {
    let docs = load_documents(&config.inputs)?;
    let provider = config.provider()?;
    let assets = config.assets()?;
    let corpus = config.corpus_source(true);
    let mut filters = BTreeMap::new();
    if let Some(model) = config.filter()? {
        let level = config
            .preset
            .ok_or_else(|| CommandError::Config("evaluating a model needs the --preset it was trained with".into()))?;
        filters.insert(level, model);
    }
    let synonyms = config.synonym_lexicon()?;
    let experiment = ExperimentConfig {
        k: config.k,
        repetitions: options.repetitions,
        seed: config.seed,
        levels: filters.keys().copied().collect(),
        baselines: options.baselines,
        k_top: options.k_top,
        ..ExperimentConfig::default()
    };
    let ctx = EvalContext {
        provider: provider.as_ref(),
        corpus: corpus.as_ref(),
        assets: &assets,
        filters: &filters,
        synonyms: synonyms.as_ref(),
    };
    let report = run_experiment(&docs, &experiment, &ctx);
    let out = config.out_dir()?;
    write(&out.join("report.json"), report.to_json())?;
    let mut csv = Vec::new();
    report
        .write_csv(&mut csv)
        .map_err(|e| CommandError::Internal(format!("report.csv: {e}")))?;
    write(&out.join("report.csv"), csv)?;
    write(&out.join("plots.json"), json(&report.plot_series()))?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineOutcome {
    pub candidates: usize,
    pub hits: TermSet,
    pub accuracy: Score,
    pub coverage: Score,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineReport {
    pub doc_id: String,
    pub split_seed: u64,
    pub novel_terms: TermSet,
    pub baselines: BTreeMap<String, BaselineOutcome>,
}

#[derive(Debug, Clone)]
pub struct BaselineOptions {
    /// Subset of 1, 2 and 3. Baseline 3 needs a synonym lexicon.
    pub which: BTreeSet<u8>,
    pub k_top: usize,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        BaselineOptions {
            which: [1, 2, 3].into(),
            k_top: ExperimentConfig::default().k_top,
        }
    }
}

/// Splits each input once and runs the requested baselines on it. Writes
/// `<out>/baselines.json`.
pub fn cmd_baseline(config: &RunConfig, options: &BaselineOptions) -> Result<Vec<BaselineReport>, CommandError> {
    if let Some(b) = options.which.iter().find(|b| !(1..=3).contains(*b)) {
        return Err(CommandError::Config(format!("no baseline {b}; choose from 1, 2, 3")));
    }
    let docs = load_documents(&config.inputs)?;
    let assets = config.assets()?;
    let lexicon = if options.which.contains(&3) {
        Some(config.synonym_lexicon()?.ok_or_else(|| {
            CommandError::Config("baseline 3 needs a WordNet synonym lexicon (--synonyms)".into())
        })?)
    } else {
        None
    };
    let corpus = config.corpus_source(true);
    let range = ExperimentConfig::default().common_range;
    let excluded = assets.lists.excluded(assets.common_cutoff);
    let mut reports = Vec::new();
    for doc in &docs {
        let seed = split_seed(config.seed, &doc.doc_id, 0);
        let split = split_document(doc, seed)?;
        let disclosed = split.disclosed_doc(doc);
        let withheld = split.withheld_doc(doc);
        let (x, y) = (&disclosed.term_set, &withheld.term_set);
        let n = novel_terms(x, y, &excluded);
        let mut baselines = BTreeMap::new();
        for &b in &options.which {
            let r = match b {
                1 => baseline1(x, y, &assets.lists, range),
                2 => baseline2(&corpus.corpus_for(&disclosed)?, options.k_top, x, y, &assets.lists),
                _ => baseline3(x, y, lexicon.as_ref().expect("checked above"), &assets.lists),
            };
            baselines.insert(
                format!("baseline{b}"),
                BaselineOutcome {
                    candidates: r.candidates.len(),
                    accuracy: accuracy(&r.candidates, &n, &assets.store),
                    coverage: coverage(&r.candidates, &n, &assets.store),
                    hits: r.hits,
                    warning: r.warning,
                },
            );
        }
        reports.push(BaselineReport {
            doc_id: doc.doc_id.clone(),
            split_seed: seed,
            novel_terms: n,
            baselines,
        });
    }
    write(&config.out_dir()?.join("baselines.json"), json(&reports))?;
    Ok(reports)
}
