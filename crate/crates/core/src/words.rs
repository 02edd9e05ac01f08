//! Word lists used for pruning and for the common-word baseline.

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

pub const COMMON_WORDS: &str = include_str!("../data/words/common_en.txt");
pub const STOP_WORDS: &str = include_str!("../data/words/stop_words.txt");
pub const VAGUE_WORDS: &str = include_str!("../data/words/vague_words.txt");

#[derive(Debug, Error)]
pub enum WordListError {
    #[error("reading word list {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("common-word list has {0} entries; at least {MIN_COMMON_WORDS} are required")]
    TooShort(usize),
}

pub const MIN_COMMON_WORDS: usize = 1000;

/// One word per line, `#` starts a comment line, blank lines ignored.
/// Entries are trimmed and lowercased; order is preserved.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn read_list(path: &Path) -> Result<Vec<String>, WordListError> {
    std::fs::read_to_string(path)
        .map(|t| parse_word_list(&t))
        .map_err(|source| WordListError::Io {
            path: path.display().to_string(),
            source,
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordLists {
    /// Most frequent first.
    pub common_words: Vec<String>,
    pub vague_words: BTreeSet<String>,
    pub stop_words: BTreeSet<String>,
}

impl WordLists {
    pub fn new(
        common_words: Vec<String>,
        vague_words: BTreeSet<String>,
        stop_words: BTreeSet<String>,
    ) -> Result<Self, WordListError> {
        if common_words.len() < MIN_COMMON_WORDS {
            return Err(WordListError::TooShort(common_words.len()));
        }
        Ok(WordLists {
            common_words,
            vague_words,
            stop_words,
        })
    }

    pub fn bundled() -> Self {
        WordLists {
            common_words: parse_word_list(COMMON_WORDS),
            vague_words: parse_word_list(VAGUE_WORDS).into_iter().collect(),
            stop_words: parse_word_list(STOP_WORDS).into_iter().collect(),
        }
    }

    /// Bundled lists with any of the given files substituted.
    pub fn load(
        common: Option<&Path>,
        stop: Option<&Path>,
        vague: Option<&Path>,
    ) -> Result<Self, WordListError> {
        let mut lists = WordLists::bundled();
        if let Some(p) = common {
            lists.common_words = read_list(p)?;
        }
        if let Some(p) = stop {
            lists.stop_words = read_list(p)?.into_iter().collect();
        }
        if let Some(p) = vague {
            lists.vague_words = read_list(p)?.into_iter().collect();
        }
        WordLists::new(lists.common_words, lists.vague_words, lists.stop_words)
    }

    /// The `cutoff` most common words.
    pub fn top_common(&self, cutoff: usize) -> &[String] {
        &self.common_words[..cutoff.min(self.common_words.len())]
    }

    /// Common words ranked in `[from, to)`.
    pub fn common_range(&self, from: usize, to: usize) -> &[String] {
        let to = to.min(self.common_words.len());
        &self.common_words[from.min(to)..to]
    }

    /// Top-`cutoff` common words plus stop and vague words: the words that are
    /// never useful recommendations.
    pub fn excluded(&self, cutoff: usize) -> BTreeSet<String> {
        self.top_common(cutoff)
            .iter()
            .chain(&self.stop_words)
            .chain(&self.vague_words)
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lists_are_usable() {
        let lists = WordLists::bundled();
        assert!(lists.common_words.len() >= MIN_COMMON_WORDS);
        assert_eq!(lists.common_words[0], "the");
        assert!(lists.stop_words.contains("each"));
        assert!(lists.stop_words.contains("shall"));
        assert!(!lists.stop_words.contains("system"));
        assert!(lists.vague_words.contains("appropriate"));
        assert!(lists
            .common_words
            .iter()
            .chain(&lists.stop_words)
            .chain(&lists.vague_words)
            .all(|w| w == &w.to_lowercase()));
    }

    #[test]
    fn parsing_skips_comments_and_blanks() {
        assert_eq!(parse_word_list("# c\n\n A \nb\n"), ["a", "b"]);
    }

    #[test]
    fn short_common_list_is_rejected() {
        let err = WordLists::new(vec!["a".into()], BTreeSet::new(), BTreeSet::new());
        assert!(matches!(err, Err(WordListError::TooShort(1))));
    }

    #[test]
    fn ranges() {
        let lists = WordLists::bundled();
        assert_eq!(lists.top_common(250).len(), 250);
        assert_eq!(lists.common_range(250, 1000).len(), 750);
        assert_eq!(lists.common_range(1000, 250).len(), 0);
        assert!(lists.excluded(250).contains("the"));
    }
}
