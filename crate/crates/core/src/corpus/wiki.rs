//! MediaWiki Action API client with an on-disk response cache.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::CorpusError;

pub const WIKIPEDIA_API: &str = "https://en.wikipedia.org/w/api.php";

#[derive(Debug, Clone)]
pub struct WikiConfig {
    pub endpoint: String,
    pub cache_dir: Option<PathBuf>,
    /// Cached responses older than this are refetched. `None` keeps them forever.
    pub ttl: Option<Duration>,
    pub concurrency: usize,
    pub requests_per_second: f64,
    pub retries: u32,
    pub backoff: Duration,
}

impl Default for WikiConfig {
    fn default() -> Self {
        WikiConfig {
            endpoint: WIKIPEDIA_API.to_string(),
            cache_dir: None,
            ttl: None,
            concurrency: 4,
            requests_per_second: 10.0,
            retries: 3,
            backoff: Duration::from_millis(500),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    url: String,
    fetched_at: u64,
    body: String,
}

/// A response body and the unix time it was first fetched.
#[derive(Debug, Clone)]
pub struct Fetched {
    pub body: Value,
    pub fetched_at: u64,
}

pub struct WikiClient {
    config: WikiConfig,
    agent: ureq::Agent,
    next_slot: Mutex<Instant>,
    network_requests: AtomicUsize,
    cache_hits: AtomicUsize,
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Parameters sorted and form-encoded, so that equal queries share a key.
fn canonical_query(params: &[(&str, &str)]) -> String {
    let mut sorted: Vec<(&str, &str)> = params.to_vec();
    sorted.sort();
    url::form_urlencoded::Serializer::new(String::new())
        .extend_pairs(sorted)
        .finish()
}

impl WikiClient {
    pub fn new(config: WikiConfig) -> Self {
        WikiClient {
            agent: ureq::AgentBuilder::new()
                .timeout(Duration::from_secs(60))
                .user_agent(concat!("reqcomp/", env!("CARGO_PKG_VERSION")))
                .build(),
            config,
            next_slot: Mutex::new(Instant::now()),
            network_requests: AtomicUsize::new(0),
            cache_hits: AtomicUsize::new(0),
        }
    }

    pub fn config(&self) -> &WikiConfig {
        &self.config
    }

    pub fn network_requests(&self) -> usize {
        self.network_requests.load(Ordering::SeqCst)
    }

    pub fn cache_hits(&self) -> usize {
        self.cache_hits.load(Ordering::SeqCst)
    }

    fn cache_path(&self, url: &str) -> Option<PathBuf> {
        let dir = self.config.cache_dir.as_ref()?;
        let digest = Sha256::digest(url.as_bytes());
        Some(dir.join(format!("{}.json", hex::encode(digest))))
    }

    fn read_cache(&self, url: &str) -> Option<CacheEntry> {
        let path = self.cache_path(url)?;
        let entry: CacheEntry = serde_json::from_str(&std::fs::read_to_string(path).ok()?).ok()?;
        if entry.url != url {
            return None;
        }
        if let Some(ttl) = self.config.ttl {
            if now_secs().saturating_sub(entry.fetched_at) > ttl.as_secs() {
                return None;
            }
        }
        Some(entry)
    }

    fn write_cache(&self, entry: &CacheEntry) -> Result<(), CorpusError> {
        let Some(path) = self.cache_path(&entry.url) else {
            return Ok(());
        };
        let io = |source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        // write then rename, so a crash never leaves a torn entry behind
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string(entry).expect("cache entry serializes"))
            .map_err(io)?;
        std::fs::rename(&tmp, &path).map_err(io)
    }

    fn throttle(&self) {
        if self.config.requests_per_second <= 0.0 {
            return;
        }
        let gap = Duration::from_secs_f64(1.0 / self.config.requests_per_second);
        let mut next = self.next_slot.lock().expect("limiter lock");
        let now = Instant::now();
        if *next > now {
            std::thread::sleep(*next - now);
        }
        *next = Instant::now().max(*next) + gap;
    }

    fn fetch(&self, url: &str) -> Result<String, CorpusError> {
        let mut attempt = 0;
        loop {
            self.throttle();
            self.network_requests.fetch_add(1, Ordering::SeqCst);
            let err = match self.agent.get(url).call() {
                Ok(resp) => {
                    return resp.into_string().map_err(|e| CorpusError::Network {
                        url: url.to_string(),
                        reason: e.to_string(),
                    })
                }
                Err(ureq::Error::Status(code, _)) if code != 429 && code < 500 => {
                    return Err(CorpusError::Network {
                        url: url.to_string(),
                        reason: format!("HTTP {code}"),
                    })
                }
                Err(e) => e,
            };
            if attempt >= self.config.retries {
                return Err(CorpusError::Network {
                    url: url.to_string(),
                    reason: err.to_string(),
                });
            }
            log::warn!("{url}: {err}; retrying");
            std::thread::sleep(self.config.backoff * 2u32.pow(attempt));
            attempt += 1;
        }
    }

    /// GETs the endpoint with `params` plus `format=json&formatversion=2`,
    /// answering from the cache when possible.
    pub fn query(&self, params: &[(&str, &str)]) -> Result<Fetched, CorpusError> {
        let mut all = params.to_vec();
        all.push(("format", "json"));
        all.push(("formatversion", "2"));
        let url = format!("{}?{}", self.config.endpoint, canonical_query(&all));

        let entry = match self.read_cache(&url) {
            Some(e) => {
                self.cache_hits.fetch_add(1, Ordering::SeqCst);
                e
            }
            None => {
                let body = self.fetch(&url)?;
                let e = CacheEntry {
                    url: url.clone(),
                    fetched_at: now_secs(),
                    body,
                };
                self.write_cache(&e)?;
                e
            }
        };
        let body: Value = serde_json::from_str(&entry.body)
            .map_err(|e| CorpusError::Api(format!("{url}: {e}")))?;
        if let Some(err) = body.get("error") {
            return Err(CorpusError::Api(format!("{url}: {err}")));
        }
        Ok(Fetched {
            body,
            fetched_at: entry.fetched_at,
        })
    }

    /// Titles of the top `limit` full-text search results in the article namespace.
    pub fn search(&self, text: &str, limit: usize) -> Result<(Vec<String>, u64), CorpusError> {
        let limit = limit.to_string();
        let f = self.query(&[
            ("action", "query"),
            ("list", "search"),
            ("srsearch", text),
            ("srnamespace", "0"),
            ("srlimit", &limit),
        ])?;
        let titles = f.body["query"]["search"]
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(|r| r["title"].as_str().map(str::to_string))
                    .collect()
            })
            .unwrap_or_default();
        Ok((titles, f.fetched_at))
    }

    /// Canonical title and plain-text body, or `None` for a missing page.
    pub fn extract(&self, title: &str) -> Result<(Option<(String, String)>, u64), CorpusError> {
        let f = self.query(&[
            ("action", "query"),
            ("prop", "extracts"),
            ("explaintext", "1"),
            ("redirects", "1"),
            ("titles", title),
        ])?;
        let page = &f.body["query"]["pages"][0];
        let found = match (page["title"].as_str(), page["extract"].as_str()) {
            (Some(t), Some(x)) if page.get("missing").is_none() => {
                Some((t.to_string(), x.to_string()))
            }
            _ => None,
        };
        Ok((found, f.fetched_at))
    }

    /// Visible categories of a page, `Category:` prefix included.
    pub fn categories(&self, title: &str) -> Result<(Vec<String>, u64), CorpusError> {
        let f = self.query(&[
            ("action", "query"),
            ("prop", "categories"),
            ("clshow", "!hidden"),
            ("cllimit", "max"),
            ("titles", title),
        ])?;
        let cats = f.body["query"]["pages"][0]["categories"]
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(|c| c["title"].as_str().map(str::to_string))
                    .collect()
            })
            .unwrap_or_default();
        Ok((cats, f.fetched_at))
    }

    /// Article pages and subcategories directly inside `category`.
    pub fn members(
        &self,
        category: &str,
        limit: usize,
    ) -> Result<(Vec<String>, Vec<String>, u64), CorpusError> {
        let limit = limit.to_string();
        let f = self.query(&[
            ("action", "query"),
            ("list", "categorymembers"),
            ("cmtitle", category),
            ("cmtype", "page|subcat"),
            ("cmlimit", &limit),
        ])?;
        let (mut pages, mut subcats) = (Vec::new(), Vec::new());
        for m in f.body["query"]["categorymembers"]
            .as_array()
            .into_iter()
            .flatten()
        {
            let Some(title) = m["title"].as_str() else { continue };
            match m["ns"].as_i64() {
                Some(0) => pages.push(title.to_string()),
                Some(14) => subcats.push(title.to_string()),
                _ => {}
            }
        }
        Ok((pages, subcats, f.fetched_at))
    }

    /// Applies `f` to every item with at most `concurrency` calls in flight.
    /// Results come back in input order.
    pub fn par_map<T: Sync, R: Send>(
        &self,
        items: &[T],
        f: impl Fn(&T) -> Result<R, CorpusError> + Sync,
    ) -> Result<Vec<R>, CorpusError> {
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<R, CorpusError>>>> =
            items.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..self.config.concurrency.max(1).min(items.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(item) = items.get(i) else { break };
                    *slots[i].lock().expect("slot lock") = Some(f(item));
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.into_inner().expect("slot lock").expect("every slot filled"))
            .collect()
    }
}
