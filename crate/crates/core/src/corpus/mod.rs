//! Domain corpus mined from Wikipedia for one requirements document.

mod keyphrase;
mod tfidf;
pub mod wiki;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nlp::Pipeline;

pub use keyphrase::{extract_keyphrases, Keyphrase};
pub use tfidf::TfIdfIndex;
pub use wiki::{WikiClient, WikiConfig, WIKIPEDIA_API};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("request to {url} failed: {reason}")]
    Network { url: String, reason: String },
    #[error("unexpected API response: {0}")]
    Api(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("corpus manifest {0} is invalid")]
    Manifest(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MineLimits {
    pub max_keyphrases: usize,
    /// Search hits taken per keyphrase.
    pub results_per_query: usize,
    pub max_articles: usize,
    pub max_bytes: usize,
    pub max_category_members: usize,
}

impl Default for MineLimits {
    fn default() -> Self {
        MineLimits {
            max_keyphrases: 50,
            results_per_query: 1,
            max_articles: 300,
            max_bytes: 20_000_000,
            max_category_members: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub title: String,
    pub text: String,
    /// Categories walked to reach the article; empty for direct matches.
    pub category_path: Vec<String>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub endpoint: String,
    pub depth: usize,
    pub limits: MineLimits,
    pub keyphrases: Vec<String>,
    /// Why mining stopped early, if it did.
    pub truncated: Option<String>,
    /// Unix seconds of the oldest and newest response used.
    pub retrieved_from: Option<u64>,
    pub retrieved_until: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainCorpus {
    pub articles: Vec<Article>,
    pub manifest: Manifest,
    /// Lemma -> occurrences over all articles.
    pub term_stats: BTreeMap<String, usize>,
    pub tfidf: TfIdfIndex,
}

/// Lowercased lemmas of the word tokens of `text`.
pub fn article_terms(text: &str) -> Vec<String> {
    Pipeline::bundled()
        .annotate("", text)
        .sentences
        .into_iter()
        .flat_map(|s| s.tokens)
        .filter(|t| t.surface.chars().any(char::is_alphabetic))
        .map(|t| t.lemma)
        .collect()
}

#[derive(Serialize, Deserialize)]
struct ArticleEntry {
    file: String,
    title: String,
    category_path: Vec<String>,
    depth: usize,
}

#[derive(Serialize, Deserialize)]
struct ManifestFile {
    #[serde(flatten)]
    manifest: Manifest,
    articles: Vec<ArticleEntry>,
}

impl DomainCorpus {
    /// Computes term statistics and the TF-IDF index for `articles`.
    pub fn new(articles: Vec<Article>, manifest: Manifest) -> Self {
        let terms: Vec<Vec<String>> = articles.iter().map(|a| article_terms(&a.text)).collect();
        let mut term_stats = BTreeMap::new();
        for t in terms.iter().flatten() {
            *term_stats.entry(t.clone()).or_insert(0) += 1;
        }
        DomainCorpus {
            articles,
            manifest,
            term_stats,
            tfidf: TfIdfIndex::build(&terms),
        }
    }

    pub fn empty(endpoint: &str) -> Self {
        DomainCorpus::new(
            Vec::new(),
            Manifest {
                endpoint: endpoint.to_string(),
                depth: 0,
                limits: MineLimits::default(),
                keyphrases: Vec::new(),
                truncated: None,
                retrieved_from: None,
                retrieved_until: None,
            },
        )
    }

    pub fn titles(&self) -> BTreeSet<&str> {
        self.articles.iter().map(|a| a.title.as_str()).collect()
    }

    /// Mean and max normalized TF-IDF of `lemma` over all articles.
    pub fn tfidf_features(&self, lemma: &str) -> (f64, f64) {
        self.tfidf.mean_max(lemma)
    }

    /// Writes `manifest.json` plus one numbered `.txt` per article.
    pub fn save(&self, dir: &Path) -> Result<(), CorpusError> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| CorpusError::Io { path, source }
        };
        let articles_dir = dir.join("articles");
        std::fs::create_dir_all(&articles_dir).map_err(io(&articles_dir))?;
        let mut entries = Vec::new();
        for (i, a) in self.articles.iter().enumerate() {
            let file = format!("articles/{i:05}.txt");
            let path = dir.join(&file);
            std::fs::write(&path, &a.text).map_err(io(&path))?;
            entries.push(ArticleEntry {
                file,
                title: a.title.clone(),
                category_path: a.category_path.clone(),
                depth: a.depth,
            });
        }
        let manifest = ManifestFile {
            manifest: self.manifest.clone(),
            articles: entries,
        };
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, json + "\n").map_err(io(&path))
    }

    pub fn load(dir: &Path) -> Result<Self, CorpusError> {
        let path = dir.join("manifest.json");
        let text = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: ManifestFile = serde_json::from_str(&text)
            .map_err(|e| CorpusError::Manifest(format!("{}: {e}", path.display())))?;
        let mut articles = Vec::with_capacity(file.articles.len());
        for e in file.articles {
            let p = dir.join(&e.file);
            let text = std::fs::read_to_string(&p).map_err(|source| CorpusError::Io {
                path: p.display().to_string(),
                source,
            })?;
            articles.push(Article {
                title: e.title,
                text,
                category_path: e.category_path,
                depth: e.depth,
            });
        }
        Ok(DomainCorpus::new(articles, file.manifest))
    }
}

/// Accumulates articles in discovery order until a limit is hit.
struct Collector {
    limits: MineLimits,
    articles: Vec<Article>,
    seen: BTreeSet<String>,
    bytes: usize,
    truncated: Option<String>,
    times: Vec<u64>,
}

impl Collector {
    fn full(&self) -> bool {
        self.truncated.is_some()
    }

    fn room(&self) -> usize {
        if self.full() {
            0
        } else {
            self.limits.max_articles - self.articles.len()
        }
    }

    fn add(&mut self, article: Article) {
        if self.full() || !self.seen.insert(article.title.clone()) {
            return;
        }
        if self.bytes + article.text.len() > self.limits.max_bytes {
            self.truncated = Some(format!("max_bytes {} reached", self.limits.max_bytes));
            return;
        }
        self.bytes += article.text.len();
        self.articles.push(article);
        if self.articles.len() >= self.limits.max_articles {
            self.truncated = Some(format!("max_articles {} reached", self.limits.max_articles));
        }
    }

    /// Fetches the titles not yet collected, at most as many as there is room
    /// for, and adds the non-empty ones.
    fn fetch(
        &mut self,
        client: &WikiClient,
        candidates: Vec<(String, Vec<String>)>,
        depth: usize,
    ) -> Result<(), CorpusError> {
        let mut wanted: Vec<(String, Vec<String>)> = Vec::new();
        for (title, path) in candidates {
            if !self.seen.contains(&title) && !wanted.iter().any(|(t, _)| *t == title) {
                wanted.push((title, path));
            }
        }
        let room = self.room();
        let capped = wanted.len() > room;
        wanted.truncate(room);
        let fetched = client.par_map(&wanted, |(title, _)| client.extract(title))?;
        for ((_, path), (page, at)) in wanted.into_iter().zip(fetched) {
            self.times.push(at);
            if let Some((title, text)) = page {
                if !text.trim().is_empty() {
                    self.add(Article {
                        title,
                        text,
                        category_path: path,
                        depth,
                    });
                }
            }
        }
        if capped && !self.full() {
            self.truncated = Some(format!("max_articles {} reached", self.limits.max_articles));
        }
        Ok(())
    }
}

/// Direct search matches for the keyphrases, then `depth` levels of
/// category members: level 1 is the pages in the categories of the direct
/// matches, level 2 the pages in their subcategories, and so on. Levels are
/// completed in order, so a deeper corpus always contains the shallower one
/// when limits allow.
pub fn mine(
    client: &WikiClient,
    keyphrases: &[Keyphrase],
    depth: usize,
    limits: &MineLimits,
) -> Result<DomainCorpus, CorpusError> {
    let queries: Vec<String> = keyphrases
        .iter()
        .take(limits.max_keyphrases)
        .map(|k| k.text.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect();
    let mut c = Collector {
        limits: limits.clone(),
        articles: Vec::new(),
        seen: BTreeSet::new(),
        bytes: 0,
        truncated: None,
        times: Vec::new(),
    };

    let hits = client.par_map(&queries, |q| client.search(q, limits.results_per_query))?;
    let mut direct = Vec::new();
    for (titles, at) in hits {
        c.times.push(at);
        direct.extend(titles.into_iter().map(|t| (t, Vec::new())));
    }
    c.fetch(client, direct, 0)?;

    let mut visited: BTreeSet<String> = BTreeSet::new();
    let mut frontier: Vec<(String, Vec<String>)> = Vec::new();
    if depth > 0 && !c.full() {
        let titles: Vec<String> = c.articles.iter().map(|a| a.title.clone()).collect();
        for (cats, at) in client.par_map(&titles, |t| client.categories(t))? {
            c.times.push(at);
            for cat in cats {
                if visited.insert(cat.clone()) {
                    frontier.push((cat.clone(), vec![cat]));
                }
            }
        }
    }
    for level in 1..=depth {
        if c.full() || frontier.is_empty() {
            break;
        }
        let listed = client.par_map(&frontier, |(cat, _)| {
            client.members(cat, limits.max_category_members)
        })?;
        let mut pages = Vec::new();
        let mut next = Vec::new();
        for ((_, path), (members, subcats, at)) in frontier.iter().zip(listed) {
            c.times.push(at);
            pages.extend(members.into_iter().map(|p| (p, path.clone())));
            for sub in subcats {
                if visited.insert(sub.clone()) {
                    let mut p = path.clone();
                    p.push(sub.clone());
                    next.push((sub, p));
                }
            }
        }
        c.fetch(client, pages, level)?;
        frontier = next;
    }

    let manifest = Manifest {
        endpoint: client.config().endpoint.clone(),
        depth,
        limits: limits.clone(),
        keyphrases: queries,
        truncated: c.truncated,
        retrieved_from: c.times.iter().min().copied(),
        retrieved_until: c.times.iter().max().copied(),
    };
    Ok(DomainCorpus::new(c.articles, manifest))
}
