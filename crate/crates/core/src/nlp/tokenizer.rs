use std::collections::HashSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

/// A token before tagging: its text and byte offsets into the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSpan {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

/// Byte range of one sentence in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSentence {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

const CLITICS: [&str; 6] = ["s", "re", "ve", "ll", "d", "m"];

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_terminator(s: &str) -> bool {
    matches!(s, "." | "!" | "?")
}

fn is_closer(s: &str) -> bool {
    matches!(s, ")" | "]" | "}" | "\"" | "'" | "\u{201d}" | "\u{2019}")
}

/// Rule-based tokenizer and sentence splitter.
///
/// Punctuation becomes its own token except for the period of a listed
/// abbreviation ("approx."), dotted initialisms ("e.g.") and decimal points
/// inside numbers. Hyphenated compounds stay whole; English clitics are split
/// treebank-style ("don't" -> "do" "n't").
#[derive(Debug, Clone)]
pub struct Tokenizer {
    abbreviations: HashSet<String>,
}

impl Tokenizer {
    pub fn new<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Tokenizer {
            abbreviations: abbreviations
                .into_iter()
                .map(|a| a.as_ref().trim().trim_end_matches('.').to_lowercase())
                .filter(|a| !a.is_empty())
                .collect(),
        }
    }

    /// Parses an abbreviation list: one entry per line, `#` comments.
    pub fn from_list(text: &str) -> Self {
        Tokenizer::new(crate::words::parse_word_list(text))
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(&word.to_lowercase())
    }

    pub fn tokenize(&self, text: &str) -> Vec<TokenSpan> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let byte_at = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
        let ch = |i: usize| chars.get(i).map(|&(_, c)| c);
        let mut out = Vec::new();
        let mut push = |start: usize, end: usize| {
            let (s, e) = (byte_at(start), byte_at(end));
            out.push(TokenSpan {
                surface: text[s..e].to_string(),
                start: s,
                end: e,
            });
        };

        let mut i = 0;
        while i < chars.len() {
            let c = chars[i].1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if !c.is_alphanumeric() {
                push(i, i + 1);
                i += 1;
                continue;
            }

            // dotted initialisms: e.g. / i.e. / U.S.
            if c.is_alphabetic() {
                let mut j = i;
                let mut letters = 0;
                while ch(j).is_some_and(char::is_alphabetic) && ch(j + 1) == Some('.') {
                    j += 2;
                    letters += 1;
                }
                if letters >= 2 && !ch(j).is_some_and(char::is_alphanumeric) {
                    push(i, j);
                    i = j;
                    continue;
                }
            }

            let mut j = i;
            if c.is_ascii_digit() {
                while ch(j).is_some_and(|c| c.is_ascii_digit()) {
                    j += 1;
                }
                while matches!(ch(j), Some('.') | Some(',') | Some(':'))
                    && ch(j + 1).is_some_and(|c| c.is_ascii_digit())
                {
                    j += 1;
                    while ch(j).is_some_and(|c| c.is_ascii_digit()) {
                        j += 1;
                    }
                }
            }
            loop {
                while ch(j).is_some_and(char::is_alphanumeric) {
                    j += 1;
                }
                match ch(j) {
                    Some('-') | Some('_') if ch(j + 1).is_some_and(char::is_alphanumeric) => {
                        j += 1;
                    }
                    Some(a) if is_apostrophe(a) && ch(j + 1).is_some_and(char::is_alphabetic) => {
                        let mut k = j + 1;
                        while ch(k).is_some_and(char::is_alphabetic) {
                            k += 1;
                        }
                        let suffix: String = chars[j + 1..k].iter().map(|&(_, c)| c).collect();
                        let suffix = suffix.to_lowercase();
                        if suffix == "t" && j > i + 1 && matches!(ch(j - 1), Some('n') | Some('N')) {
                            push(i, j - 1);
                            push(j - 1, k);
                            i = k;
                            break;
                        }
                        if CLITICS.contains(&suffix.as_str()) {
                            push(i, j);
                            push(j, k);
                            i = k;
                            break;
                        }
                        // O'Brien and friends
                        j = k;
                    }
                    _ => {
                        let word = &text[byte_at(i)..byte_at(j)];
                        if ch(j) == Some('.') && self.is_abbreviation(word) {
                            j += 1;
                        }
                        push(i, j);
                        i = j;
                        break;
                    }
                }
            }
        }
        out
    }

    /// Groups already-tokenized text into sentences, returning token index ranges.
    pub fn sentence_ranges(&self, text: &str, tokens: &[TokenSpan]) -> Vec<Range<usize>> {
        let mut ranges = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < tokens.len() {
            let tok = &tokens[i];
            let mut end = i + 1;
            let mut boundary = false;
            if is_terminator(&tok.surface) {
                while end < tokens.len() && is_terminator(&tokens[end].surface) {
                    end += 1;
                }
                while end < tokens.len()
                    && is_closer(&tokens[end].surface)
                    && tokens[end].start == tokens[end - 1].end
                {
                    end += 1;
                }
                boundary = match tokens.get(end) {
                    None => true,
                    Some(next) => !next.surface.chars().next().is_some_and(char::is_lowercase),
                };
            } else if tok.surface.eq_ignore_ascii_case("etc.") {
                boundary = tokens
                    .get(end)
                    .is_some_and(|n| n.surface.chars().next().is_some_and(char::is_uppercase));
            }
            if !boundary {
                if let Some(next) = tokens.get(end) {
                    let gap = &text[tokens[end - 1].end..next.start];
                    boundary = gap.matches('\n').count() >= 2;
                }
            }
            if boundary || end == tokens.len() {
                ranges.push(start..end);
                start = end;
            }
            i = end;
        }
        ranges
    }

    pub fn split_sentences(&self, text: &str) -> Vec<RawSentence> {
        let tokens = self.tokenize(text);
        self.sentence_ranges(text, &tokens)
            .into_iter()
            .map(|r| {
                let (s, e) = (tokens[r.start].start, tokens[r.end - 1].end);
                RawSentence {
                    start: s,
                    end: e,
                    text: text[s..e].to_string(),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tokenizer() -> Tokenizer {
        Tokenizer::from_list(crate::nlp::assets::ABBREVIATIONS)
    }

    fn surfaces(text: &str) -> Vec<String> {
        tokenizer().tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn splits_trailing_period() {
        assert_eq!(
            surfaces("The model shall be implemented in Python."),
            ["The", "model", "shall", "be", "implemented", "in", "Python", "."]
        );
    }

    #[test]
    fn empty_input() {
        assert!(surfaces("").is_empty());
        assert!(surfaces("  \n\t ").is_empty());
    }

    #[test]
    fn punctuation_is_its_own_token() {
        assert_eq!(surfaces("levels, product"), ["levels", ",", "product"]);
        assert_eq!(surfaces("(see above)"), ["(", "see", "above", ")"]);
    }

    #[test]
    fn keeps_numbers_compounds_and_abbreviations() {
        assert_eq!(surfaces("within 2.5 ms"), ["within", "2.5", "ms"]);
        assert_eq!(surfaces("real-time data"), ["real-time", "data"]);
        assert_eq!(surfaces("e.g. logs"), ["e.g.", "logs"]);
        assert_eq!(surfaces("Approx. 5"), ["Approx.", "5"]);
        assert_eq!(surfaces("version 5."), ["version", "5", "."]);
    }

    #[test]
    fn splits_clitics() {
        assert_eq!(surfaces("don't"), ["do", "n't"]);
        assert_eq!(surfaces("the user's data"), ["the", "user", "'s", "data"]);
        assert_eq!(surfaces("O'Brien"), ["O'Brien"]);
    }

    #[test]
    fn sentences() {
        let t = tokenizer();
        assert_eq!(t.split_sentences("A shall X. B shall Y.").len(), 2);
        assert_eq!(t.split_sentences("No terminator").len(), 1);
        let s = t.split_sentences("Approx. 5 ms. Next.");
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].text, "Approx. 5 ms.");
        assert_eq!(s[1].text, "Next.");
        assert!(t.split_sentences("").is_empty());
    }

    #[test]
    fn blank_lines_separate_sentences() {
        let t = tokenizer();
        let s = t.split_sentences("Heading one\n\nThe system shall log events");
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].text, "Heading one");
    }

    #[test]
    fn lowercase_continuation_is_not_a_boundary() {
        let t = tokenizer();
        assert_eq!(t.split_sentences("Use v. the other one.").len(), 1);
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        let t = tokenizer();
        let s = t.split_sentences("He said \"stop.\" Then left.");
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].text, "He said \"stop.\"");
    }

    proptest! {
        #[test]
        fn offsets_match_surfaces(text in "[a-zA-Z0-9 ,.;:'()\\-\n]{0,80}") {
            for tok in tokenizer().tokenize(&text) {
                prop_assert!(tok.start < tok.end);
                prop_assert_eq!(&text[tok.start..tok.end], tok.surface.as_str());
            }
        }

        #[test]
        fn tokens_cover_all_non_whitespace(text in "\\PC{0,60}") {
            let toks = tokenizer().tokenize(&text);
            let joined: String = toks.iter().map(|t| t.surface.as_str()).collect();
            let expected: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, expected);
        }

        #[test]
        fn sentences_are_ordered_disjoint_and_cover(text in "[a-zA-Z ,.!?\n]{0,80}") {
            let t = tokenizer();
            let sents = t.split_sentences(&text);
            let mut last = 0;
            let mut covered: String = String::new();
            for s in &sents {
                prop_assert!(s.start >= last);
                prop_assert!(s.start < s.end);
                last = s.end;
                covered.extend(s.text.chars().filter(|c| !c.is_whitespace()));
            }
            let expected: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(covered, expected);
        }
    }
}
