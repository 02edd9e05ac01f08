//! Recommends terminology that a natural-language requirements document is
//! likely missing, by masking its nouns and verbs, collecting masked-word
//! predictions from a language model, and filtering them.

pub mod commands;
pub mod corpus;
pub mod embeddings;
pub mod eval;
pub mod features;
pub mod mask;
pub mod ml;
pub mod mlm;
pub mod nlp;
pub mod pipeline;
pub mod prune;
pub mod stub;
pub mod words;
