use std::collections::{BTreeSet, HashMap, HashSet};

use super::tags::PosTag;
use super::NlpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum LemmaClass {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl LemmaClass {
    const ALL: [LemmaClass; 4] = [
        LemmaClass::Noun,
        LemmaClass::Verb,
        LemmaClass::Adj,
        LemmaClass::Adv,
    ];

    fn parse(s: &str) -> Option<Self> {
        match s {
            "noun" => Some(LemmaClass::Noun),
            "verb" => Some(LemmaClass::Verb),
            "adj" => Some(LemmaClass::Adj),
            "adv" => Some(LemmaClass::Adv),
            _ => None,
        }
    }

    fn of(pos: PosTag) -> Option<Self> {
        if pos.is_noun() {
            Some(LemmaClass::Noun)
        } else if pos.is_verb() {
            Some(LemmaClass::Verb)
        } else if pos.is_adjective() {
            Some(LemmaClass::Adj)
        } else if pos.is_adverb() {
            Some(LemmaClass::Adv)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Default)]
struct ClassTables {
    exceptions: HashMap<String, Vec<String>>,
    index: HashSet<String>,
    rules: Vec<(String, String)>,
}

/// Exception tables plus suffix rules, checked against a base-form index.
///
/// Output is always lowercase. A word is returned unchanged (lowercased)
/// when its tag is already a base form (NN, VB, JJ, RB, proper nouns), when
/// it has no exception entry, or when no suffix rule leads to an indexed
/// base form.
#[derive(Debug, Clone)]
pub struct Lemmatizer {
    tables: HashMap<LemmaClass, ClassTables>,
}

pub struct LemmaTables<'a> {
    pub rules: &'a str,
    pub noun_exc: &'a str,
    pub verb_exc: &'a str,
    pub adj_exc: &'a str,
    pub adv_exc: &'a str,
    pub noun_idx: &'a str,
    pub verb_idx: &'a str,
    pub adj_idx: &'a str,
    pub adv_idx: &'a str,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

impl Lemmatizer {
    pub fn from_tables(t: &LemmaTables<'_>) -> Result<Self, NlpError> {
        let mut tables: HashMap<LemmaClass, ClassTables> = LemmaClass::ALL
            .iter()
            .map(|&c| (c, ClassTables::default()))
            .collect();

        let exc = [
            (LemmaClass::Noun, t.noun_exc),
            (LemmaClass::Verb, t.verb_exc),
            (LemmaClass::Adj, t.adj_exc),
            (LemmaClass::Adv, t.adv_exc),
        ];
        for (class, text) in exc {
            let table = tables.get_mut(&class).expect("all classes present");
            for (lineno, line) in data_lines(text) {
                let mut parts = line.split_whitespace();
                // `inflected lemma [lemma...]`
                let word = parts.next().unwrap_or_default().to_lowercase();
                let lemmas: Vec<String> = parts.map(str::to_lowercase).collect();
                if lemmas.is_empty() {
                    return Err(NlpError::Asset {
                        asset: "lemma exceptions",
                        line: lineno,
                        reason: format!("`{word}` has no lemma"),
                    });
                }
                table.exceptions.insert(word, lemmas);
            }
        }

        let idx = [
            (LemmaClass::Noun, t.noun_idx),
            (LemmaClass::Verb, t.verb_idx),
            (LemmaClass::Adj, t.adj_idx),
            (LemmaClass::Adv, t.adv_idx),
        ];
        for (class, text) in idx {
            let table = tables.get_mut(&class).expect("all classes present");
            table
                .index
                .extend(data_lines(text).map(|(_, l)| l.trim().to_lowercase()));
        }

        for (lineno, line) in data_lines(t.rules) {
            let fields: Vec<&str> = line.split('\t').collect();
            let class = fields
                .first()
                .and_then(|c| LemmaClass::parse(c))
                .filter(|_| fields.len() == 3)
                .ok_or_else(|| NlpError::Asset {
                    asset: "lemma rules",
                    line: lineno,
                    reason: "expected `pos<TAB>suffix<TAB>replacement`".into(),
                })?;
            tables
                .get_mut(&class)
                .expect("all classes present")
                .rules
                .push((fields[1].to_string(), fields[2].to_string()));
        }
        Ok(Lemmatizer { tables })
    }

    pub fn lemmatize(&self, surface: &str, pos: PosTag) -> String {
        let lower = surface.to_lowercase();
        let base_form = matches!(
            pos,
            PosTag::NN | PosTag::NNP | PosTag::NNPS | PosTag::VB | PosTag::JJ | PosTag::RB
        );
        if base_form || !lower.chars().any(char::is_alphabetic) {
            return lower;
        }
        match LemmaClass::of(pos) {
            Some(class) => self.reduce(&lower, class).unwrap_or(lower),
            None => lower,
        }
    }

    /// Lemma of a word seen without context: indexed words are kept, otherwise
    /// the first noun, verb, then adjective reduction wins.
    pub fn lemmatize_bare(&self, word: &str) -> String {
        let lower = word.to_lowercase();
        if self.tables.values().any(|t| t.index.contains(&lower)) {
            return lower;
        }
        [LemmaClass::Noun, LemmaClass::Verb, LemmaClass::Adj]
            .iter()
            .find_map(|&c| self.reduce(&lower, c))
            .unwrap_or(lower)
    }

    /// Every lemma the word could have under some word class, including itself.
    pub fn candidate_lemmas(&self, word: &str) -> BTreeSet<String> {
        let lower = word.to_lowercase();
        let mut out: BTreeSet<String> = LemmaClass::ALL
            .iter()
            .filter_map(|&c| self.reduce(&lower, c))
            .collect();
        out.insert(lower);
        out
    }

    /// Candidate base forms of `word` within one class, exceptions first.
    fn candidates(&self, word: &str, class: LemmaClass) -> Vec<String> {
        let table = &self.tables[&class];
        let mut forms: Vec<String> = table.exceptions.get(word).cloned().unwrap_or_default();
        for (old, new) in &table.rules {
            if let Some(stem) = word.strip_suffix(old.as_str()) {
                if stem.is_empty() {
                    continue;
                }
                let form = format!("{stem}{new}");
                if table.index.contains(&form) && !forms.contains(&form) {
                    forms.push(form);
                }
            }
        }
        forms
    }

    /// First candidate that is itself a fixed point, so that lemmatizing a
    /// lemma never changes it.
    fn reduce(&self, word: &str, class: LemmaClass) -> Option<String> {
        self.candidates(word, class).into_iter().find(|c| {
            c == word || {
                let next = self.candidates(c, class);
                next.is_empty() || next.first() == Some(c)
            }
        })
    }
}
