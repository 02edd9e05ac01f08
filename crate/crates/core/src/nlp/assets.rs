//! Data files compiled into the crate.

pub const TAGGER_WEIGHTS: &str = include_str!("../../data/tagger/weights.tsv");
pub const TAGGER_TAGDICT: &str = include_str!("../../data/tagger/tagdict.tsv");

pub const LEMMA_RULES: &str = include_str!("../../data/lemma/rules.tsv");
pub const NOUN_EXC: &str = include_str!("../../data/lemma/noun.exc");
pub const VERB_EXC: &str = include_str!("../../data/lemma/verb.exc");
pub const ADJ_EXC: &str = include_str!("../../data/lemma/adj.exc");
pub const ADV_EXC: &str = include_str!("../../data/lemma/adv.exc");
pub const NOUN_IDX: &str = include_str!("../../data/lemma/noun.idx");
pub const VERB_IDX: &str = include_str!("../../data/lemma/verb.idx");
pub const ADJ_IDX: &str = include_str!("../../data/lemma/adj.idx");
pub const ADV_IDX: &str = include_str!("../../data/lemma/adv.idx");

pub const ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");
