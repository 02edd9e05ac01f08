//! The three non-model baselines: common words, corpus TF-IDF terms, and
//! synonyms of disclosed terms.
//!
//! Each returns its candidate terms (scored as the baseline's recommendation
//! set) and the subset found in the withheld half.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::DomainCorpus;
use crate::nlp::Pipeline;
use crate::words::WordLists;

use super::metrics::TermSet;
use super::EvalError;

pub const COMMON_RANGE: (usize, usize) = (250, 1000);
pub const DEFAULT_K_TOP: usize = 1000;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub candidates: TermSet,
    pub hits: TermSet,
    /// Set when the baseline had nothing to draw from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Keeps candidate words absent from the disclosed terms and the stop list;
/// the hits are those present in the withheld terms.
fn filter<'a>(
    words: impl IntoIterator<Item = &'a str>,
    disclosed: &TermSet,
    withheld: &TermSet,
    stop: &BTreeSet<String>,
) -> BaselineResult {
    let lem = Pipeline::bundled().lemmatizer();
    let mut out = BaselineResult::default();
    for w in words {
        let w = w.to_lowercase();
        if !w.chars().any(char::is_alphabetic) || stop.contains(&w) {
            continue;
        }
        let lemma = lem.lemmatize_bare(&w);
        if disclosed.contains(&w) || disclosed.contains(&lemma) || stop.contains(&lemma) {
            continue;
        }
        if withheld.contains(&w) || withheld.contains(&lemma) {
            out.hits.insert(lemma.clone());
        }
        out.candidates.insert(lemma);
    }
    out
}

/// Common English words ranked within `range`.
pub fn baseline1(disclosed: &TermSet, withheld: &TermSet, lists: &WordLists, range: (usize, usize)) -> BaselineResult {
    let words = lists.common_range(range.0, range.1).iter().map(String::as_str);
    filter(words, disclosed, withheld, &lists.stop_words)
}

/// The `k_top` terms of highest mean TF-IDF in the corpus.
pub fn baseline2(corpus: &DomainCorpus, k_top: usize, disclosed: &TermSet, withheld: &TermSet, lists: &WordLists) -> BaselineResult {
    if corpus.articles.is_empty() {
        return BaselineResult {
            warning: Some("domain corpus is empty".into()),
            ..Default::default()
        };
    }
    let ranked = corpus.tfidf.ranked_by_mean();
    let words = ranked.iter().take(k_top).map(|(t, _)| t.as_str());
    filter(words, disclosed, withheld, &lists.stop_words)
}

/// Synonyms of every disclosed term.
pub fn baseline3(disclosed: &TermSet, withheld: &TermSet, lexicon: &SynonymLexicon, lists: &WordLists) -> BaselineResult {
    let synonyms: BTreeSet<&str> = disclosed.iter().flat_map(|t| lexicon.synonyms(t)).collect();
    filter(synonyms, disclosed, withheld, &lists.stop_words)
}

/// Single-word synonyms read from WordNet database files (`data.noun`,
/// `data.verb`, ...): each synset line lists its words after the offset,
/// lexicographer file number, synset type and hexadecimal word count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymLexicon {
    synonyms: BTreeMap<String, BTreeSet<String>>,
}

impl SynonymLexicon {
    pub fn read(&mut self, reader: impl BufRead, source: &str) -> Result<(), EvalError> {
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| EvalError::Lexicon(format!("{source}: {e}")))?;
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            let bad = || EvalError::Lexicon(format!("{source}:{}: not a synset line", i + 1));
            let fields: Vec<&str> = line.split(' ').collect();
            if fields.len() < 4 || fields[0].parse::<u64>().is_err() {
                return Err(bad());
            }
            let count = usize::from_str_radix(fields[3], 16).map_err(|_| bad())?;
            if fields.len() < 4 + 2 * count {
                return Err(bad());
            }
            let words: Vec<String> = (0..count)
                .map(|j| {
                    let w = fields[4 + 2 * j];
                    // adjective markers: "(a)", "(p)", "(ip)"
                    w.split('(').next().unwrap_or(w).to_lowercase()
                })
                .filter(|w| !w.contains('_') && w.chars().all(char::is_alphabetic))
                .collect();
            for w in &words {
                let entry = self.synonyms.entry(w.clone()).or_default();
                entry.extend(words.iter().filter(|o| *o != w).cloned());
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut lex = SynonymLexicon::default();
        lex.read(text.as_bytes(), "<text>")?;
        Ok(lex)
    }

    /// A single data file, or a directory holding `data.noun`, `data.verb`,
    /// `data.adj` and `data.adv` (whichever exist).
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let files: Vec<_> = if path.is_dir() {
            ["data.noun", "data.verb", "data.adj", "data.adv"]
                .iter()
                .map(|f| path.join(f))
                .filter(|p| p.is_file())
                .collect()
        } else {
            vec![path.to_path_buf()]
        };
        if files.is_empty() {
            return Err(EvalError::Lexicon(format!("{}: no WordNet data files", path.display())));
        }
        let mut lex = SynonymLexicon::default();
        for f in files {
            let file = std::fs::File::open(&f).map_err(|e| EvalError::Lexicon(format!("{}: {e}", f.display())))?;
            lex.read(std::io::BufReader::new(file), &f.display().to_string())?;
        }
        Ok(lex)
    }

    pub fn synonyms(&self, word: &str) -> impl Iterator<Item = &str> {
        self.synonyms.get(word).into_iter().flatten().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.synonyms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synonyms.is_empty()
    }
}
