// Greedy averaged-perceptron tagger. Feature templates and normalisation
// follow Matthew Honnibal's 200-line tagger so the bundled weights (trained
// on the WSJ treebank) can be used as-is.

use std::collections::HashMap;

use super::tags::PosTag;
use super::NlpError;

const START: [&str; 2] = ["-START-", "-START2-"];
const END: [&str; 2] = ["-END-", "-END2-"];

#[derive(Debug, Clone)]
struct Model {
    classes: Vec<String>,
    weights: HashMap<String, Vec<(u16, f64)>>,
    tagdict: HashMap<String, u16>,
}

/// POS tagger over tokenized sentences.
///
/// With weights loaded, tags come from the perceptron; punctuation-only and
/// numeric tokens are always resolved by rule. Without weights the rule
/// tagger handles every token.
#[derive(Debug, Clone)]
pub struct Tagger {
    model: Option<Model>,
}

impl Tagger {
    /// Parses a weights file (`feature<TAB>TAG weight<TAB>...`) and a tag
    /// dictionary (`word<TAB>TAG`).
    pub fn from_tables(weights: &str, tagdict: &str) -> Result<Self, NlpError> {
        let mut classes: Vec<String> = Vec::new();
        let mut class_ids: HashMap<String, u16> = HashMap::new();
        let mut intern = |label: &str| -> u16 {
            if let Some(&id) = class_ids.get(label) {
                return id;
            }
            let id = classes.len() as u16;
            classes.push(label.to_string());
            class_ids.insert(label.to_string(), id);
            id
        };

        let mut table = HashMap::new();
        for (lineno, line) in weights.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let feature = fields.next().unwrap_or_default();
            let mut row = Vec::new();
            for field in fields {
                let (label, w) = field.split_once(' ').ok_or_else(|| NlpError::Asset {
                    asset: "tagger weights",
                    line: lineno + 1,
                    reason: format!("expected `TAG weight`, got `{field}`"),
                })?;
                let w: f64 = w.parse().map_err(|_| NlpError::Asset {
                    asset: "tagger weights",
                    line: lineno + 1,
                    reason: format!("bad weight `{w}`"),
                })?;
                row.push((intern(label), w));
            }
            table.insert(feature.to_string(), row);
        }

        let mut dict = HashMap::new();
        for (lineno, line) in tagdict.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, label) = line.split_once('\t').ok_or_else(|| NlpError::Asset {
                asset: "tag dictionary",
                line: lineno + 1,
                reason: "expected `word<TAB>TAG`".into(),
            })?;
            dict.insert(word.to_string(), intern(label));
        }

        for label in &classes {
            if PosTag::from_treebank(label).is_none() {
                return Err(NlpError::Asset {
                    asset: "tagger weights",
                    line: 0,
                    reason: format!("label `{label}` is outside the tag set"),
                });
            }
        }

        Ok(Tagger {
            model: Some(Model {
                classes,
                weights: table,
                tagdict: dict,
            }),
        })
    }

    /// Heuristic tagger used when no weights are available.
    pub fn rules_only() -> Self {
        Tagger { model: None }
    }

    pub fn has_model(&self) -> bool {
        self.model.is_some()
    }

    /// Tags one sentence. Tagging state does not carry across calls.
    pub fn tag<S: AsRef<str>>(&self, words: &[S]) -> Vec<PosTag> {
        let words: Vec<&str> = words.iter().map(AsRef::as_ref).collect();
        match &self.model {
            Some(model) => model.tag(&words),
            None => tag_by_rules(&words),
        }
    }
}

impl Model {
    fn tag(&self, words: &[&str]) -> Vec<PosTag> {
        let mut context: Vec<String> = START.iter().map(|s| s.to_string()).collect();
        context.extend(words.iter().map(|w| normalize(w)));
        context.extend(END.iter().map(|s| s.to_string()));

        let mut prev = START[0].to_string();
        let mut prev2 = START[1].to_string();
        let mut out = Vec::with_capacity(words.len());
        for (i, word) in words.iter().enumerate() {
            let label = match punctuation_rule(word) {
                Some(treebank) => treebank.to_string(),
                None => match self.tagdict.get(*word) {
                    Some(&id) => self.classes[id as usize].clone(),
                    None => self.predict(&features(i, word, &context, &prev, &prev2)),
                },
            };
            out.push(PosTag::from_treebank(&label).unwrap_or(PosTag::NN));
            prev2 = std::mem::replace(&mut prev, label);
        }
        out
    }

    fn predict(&self, features: &[String]) -> String {
        let mut scores = vec![0.0f64; self.classes.len()];
        for feat in features {
            if let Some(row) = self.weights.get(feat) {
                for &(class, w) in row {
                    scores[class as usize] += w;
                }
            }
        }
        // highest score, ties broken towards the lexicographically larger label
        let mut best = 0;
        for c in 1..self.classes.len() {
            if scores[c] > scores[best]
                || (scores[c] == scores[best] && self.classes[c] > self.classes[best])
            {
                best = c;
            }
        }
        self.classes[best].clone()
    }
}

fn normalize(word: &str) -> String {
    let first = word.chars().next();
    if word.contains('-') && first != Some('-') {
        "!HYPHEN".into()
    } else if word.chars().count() == 4 && word.chars().all(|c| c.is_ascii_digit()) {
        "!YEAR".into()
    } else if first.is_some_and(|c| c.is_ascii_digit()) {
        "!DIGITS".into()
    } else {
        word.to_lowercase()
    }
}

fn suffix3(s: &str) -> &str {
    match s.char_indices().rev().nth(2) {
        Some((i, _)) => &s[i..],
        None => s,
    }
}

fn prefix1(s: &str) -> &str {
    match s.char_indices().nth(1) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

fn features(i: usize, word: &str, context: &[String], prev: &str, prev2: &str) -> Vec<String> {
    let i = i + START.len();
    vec![
        "bias".to_string(),
        format!("i suffix {}", suffix3(word)),
        format!("i pref1 {}", prefix1(word)),
        format!("i-1 tag {prev}"),
        format!("i-2 tag {prev2}"),
        format!("i tag+i-2 tag {prev} {prev2}"),
        format!("i word {}", context[i]),
        format!("i-1 tag+i word {prev} {}", context[i]),
        format!("i-1 word {}", context[i - 1]),
        format!("i-1 suffix {}", suffix3(&context[i - 1])),
        format!("i-2 word {}", context[i - 2]),
        format!("i+1 word {}", context[i + 1]),
        format!("i+1 suffix {}", suffix3(&context[i + 1])),
        format!("i+2 word {}", context[i + 2]),
    ]
}

/// Treebank label for tokens made only of punctuation.
fn punctuation_rule(word: &str) -> Option<&'static str> {
    if word.is_empty() || word.chars().any(char::is_alphanumeric) {
        return None;
    }
    Some(match word {
        "," => ",",
        "." | "!" | "?" => ".",
        "$" => "$",
        "#" => "#",
        "(" | "[" | "{" => "-LRB-",
        ")" | "]" | "}" => "-RRB-",
        _ => ":",
    })
}

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "all", "any", "some",
    "no", "another", "either", "neither",
];
const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "of", "for", "with", "by", "from", "into", "onto", "over", "under",
    "between", "among", "through", "during", "before", "after", "about", "against", "within",
    "without", "upon", "via", "per", "if", "because", "while", "although", "whether", "than",
];
const MODALS: &[&str] = &[
    "shall", "must", "should", "will", "would", "can", "could", "may", "might",
];
const PRONOUNS: &[&str] = &[
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
];
const POSSESSIVES: &[&str] = &["my", "your", "his", "its", "our", "their"];
const CONJUNCTIONS: &[&str] = &["and", "or", "but", "nor"];
const BE_FORMS: &[(&str, &str)] = &[
    ("be", "VB"),
    ("is", "VBZ"),
    ("are", "VBP"),
    ("was", "VBD"),
    ("were", "VBD"),
    ("been", "VBN"),
    ("being", "VBG"),
    ("has", "VBZ"),
    ("have", "VBP"),
    ("had", "VBD"),
    ("does", "VBZ"),
    ("do", "VBP"),
    ("did", "VBD"),
];

fn tag_by_rules(words: &[&str]) -> Vec<PosTag> {
    let mut out: Vec<PosTag> = Vec::with_capacity(words.len());
    for (i, word) in words.iter().enumerate() {
        let lower = word.to_lowercase();
        let prev = out.last().copied();
        let label: &str = if let Some(p) = punctuation_rule(word) {
            p
        } else if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            "CD"
        } else if DETERMINERS.contains(&lower.as_str()) {
            "DT"
        } else if lower == "to" {
            "TO"
        } else if PREPOSITIONS.contains(&lower.as_str()) {
            "IN"
        } else if MODALS.contains(&lower.as_str()) {
            "MD"
        } else if PRONOUNS.contains(&lower.as_str()) {
            "PRP"
        } else if POSSESSIVES.contains(&lower.as_str()) {
            "PRP$"
        } else if CONJUNCTIONS.contains(&lower.as_str()) {
            "CC"
        } else if let Some((_, t)) = BE_FORMS.iter().find(|(w, _)| *w == lower) {
            t
        } else if matches!(prev, Some(PosTag::MD) | Some(PosTag::TO)) {
            "VB"
        } else if lower.ends_with("ly") {
            "RB"
        } else if lower.ends_with("ing") {
            "VBG"
        } else if lower.ends_with("ed") {
            if matches!(prev, Some(PosTag::VBZ | PosTag::VBP | PosTag::VBD | PosTag::VB)) {
                "VBN"
            } else {
                "VBD"
            }
        } else if ["able", "ible", "al", "ive", "ous", "ful", "less", "ic"]
            .iter()
            .any(|s| lower.ends_with(s))
        {
            "JJ"
        } else if i > 0 && word.chars().next().is_some_and(char::is_uppercase) {
            "NNP"
        } else if lower.ends_with('s') && !lower.ends_with("ss") && lower.len() > 3 {
            "NNS"
        } else {
            "NN"
        };
        out.push(PosTag::from_treebank(label).unwrap_or(PosTag::NN));
    }
    out
}
