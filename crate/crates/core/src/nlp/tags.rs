use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Penn Treebank word tags, with sentence punctuation folded into
/// `COMMA`, `PERIOD` and `PUNCT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PosTag {
    CC,
    CD,
    DT,
    EX,
    FW,
    IN,
    JJ,
    JJR,
    JJS,
    LS,
    MD,
    NN,
    NNS,
    NNP,
    NNPS,
    PDT,
    POS,
    PRP,
    PRPS,
    RB,
    RBR,
    RBS,
    RP,
    SYM,
    TO,
    UH,
    VB,
    VBD,
    VBG,
    VBN,
    VBP,
    VBZ,
    WDT,
    WP,
    WPS,
    WRB,
    Dollar,
    Hash,
    Comma,
    Period,
    Punct,
}

impl PosTag {
    pub const ALL: [PosTag; 41] = [
        PosTag::CC,
        PosTag::CD,
        PosTag::DT,
        PosTag::EX,
        PosTag::FW,
        PosTag::IN,
        PosTag::JJ,
        PosTag::JJR,
        PosTag::JJS,
        PosTag::LS,
        PosTag::MD,
        PosTag::NN,
        PosTag::NNS,
        PosTag::NNP,
        PosTag::NNPS,
        PosTag::PDT,
        PosTag::POS,
        PosTag::PRP,
        PosTag::PRPS,
        PosTag::RB,
        PosTag::RBR,
        PosTag::RBS,
        PosTag::RP,
        PosTag::SYM,
        PosTag::TO,
        PosTag::UH,
        PosTag::VB,
        PosTag::VBD,
        PosTag::VBG,
        PosTag::VBN,
        PosTag::VBP,
        PosTag::VBZ,
        PosTag::WDT,
        PosTag::WP,
        PosTag::WPS,
        PosTag::WRB,
        PosTag::Dollar,
        PosTag::Hash,
        PosTag::Comma,
        PosTag::Period,
        PosTag::Punct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::CC => "CC",
            PosTag::CD => "CD",
            PosTag::DT => "DT",
            PosTag::EX => "EX",
            PosTag::FW => "FW",
            PosTag::IN => "IN",
            PosTag::JJ => "JJ",
            PosTag::JJR => "JJR",
            PosTag::JJS => "JJS",
            PosTag::LS => "LS",
            PosTag::MD => "MD",
            PosTag::NN => "NN",
            PosTag::NNS => "NNS",
            PosTag::NNP => "NNP",
            PosTag::NNPS => "NNPS",
            PosTag::PDT => "PDT",
            PosTag::POS => "POS",
            PosTag::PRP => "PRP",
            PosTag::PRPS => "PRP$",
            PosTag::RB => "RB",
            PosTag::RBR => "RBR",
            PosTag::RBS => "RBS",
            PosTag::RP => "RP",
            PosTag::SYM => "SYM",
            PosTag::TO => "TO",
            PosTag::UH => "UH",
            PosTag::VB => "VB",
            PosTag::VBD => "VBD",
            PosTag::VBG => "VBG",
            PosTag::VBN => "VBN",
            PosTag::VBP => "VBP",
            PosTag::VBZ => "VBZ",
            PosTag::WDT => "WDT",
            PosTag::WP => "WP",
            PosTag::WPS => "WP$",
            PosTag::WRB => "WRB",
            PosTag::Dollar => "$",
            PosTag::Hash => "#",
            PosTag::Comma => "COMMA",
            PosTag::Period => "PERIOD",
            PosTag::Punct => "PUNCT",
        }
    }

    /// Maps a raw treebank label (as produced by the perceptron model) to a tag.
    /// Brackets, quotes and colons become `PUNCT`.
    pub fn from_treebank(label: &str) -> Option<PosTag> {
        match label {
            "," => Some(PosTag::Comma),
            "." => Some(PosTag::Period),
            ":" | "``" | "''" | "-LRB-" | "-RRB-" | "(" | ")" => Some(PosTag::Punct),
            other => other.parse().ok(),
        }
    }

    pub fn is_noun(self) -> bool {
        matches!(self, PosTag::NN | PosTag::NNS | PosTag::NNP | PosTag::NNPS)
    }

    pub fn is_verb(self) -> bool {
        matches!(
            self,
            PosTag::VB | PosTag::VBD | PosTag::VBG | PosTag::VBN | PosTag::VBP | PosTag::VBZ
        )
    }

    pub fn is_adjective(self) -> bool {
        matches!(self, PosTag::JJ | PosTag::JJR | PosTag::JJS)
    }

    pub fn is_adverb(self) -> bool {
        matches!(self, PosTag::RB | PosTag::RBR | PosTag::RBS)
    }

    pub fn is_punctuation(self) -> bool {
        matches!(self, PosTag::Comma | PosTag::Period | PosTag::Punct)
    }

    pub fn word_class(self) -> Option<WordClass> {
        if self.is_noun() {
            Some(WordClass::Noun)
        } else if self.is_verb() {
            Some(WordClass::Verb)
        } else {
            None
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownTag(pub String);

impl fmt::Display for UnknownTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown POS tag `{}`", self.0)
    }
}

impl std::error::Error for UnknownTag {}

impl FromStr for PosTag {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PosTag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownTag(s.to_string()))
    }
}

impl From<PosTag> for String {
    fn from(t: PosTag) -> String {
        t.as_str().to_string()
    }
}

impl TryFrom<String> for PosTag {
    type Error = UnknownTag;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Coarse class of a masked word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordClass {
    Noun,
    Verb,
}

impl WordClass {
    pub fn as_str(self) -> &'static str {
        match self {
            WordClass::Noun => "noun",
            WordClass::Verb => "verb",
        }
    }
}

impl fmt::Display for WordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_tag_round_trips_through_its_name() {
        for tag in PosTag::ALL {
            assert_eq!(tag.as_str().parse::<PosTag>().unwrap(), tag);
        }
    }

    #[test]
    fn treebank_punctuation_is_folded() {
        assert_eq!(PosTag::from_treebank(","), Some(PosTag::Comma));
        assert_eq!(PosTag::from_treebank("."), Some(PosTag::Period));
        assert_eq!(PosTag::from_treebank("-LRB-"), Some(PosTag::Punct));
        assert_eq!(PosTag::from_treebank("PRP$"), Some(PosTag::PRPS));
        assert_eq!(PosTag::from_treebank("XYZ"), None);
    }

    #[test]
    fn word_classes() {
        assert_eq!(PosTag::NNPS.word_class(), Some(WordClass::Noun));
        assert_eq!(PosTag::VBZ.word_class(), Some(WordClass::Verb));
        assert_eq!(PosTag::MD.word_class(), None);
    }
}
