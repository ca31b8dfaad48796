//! The bundled test knowledge base, lexicon and schema mappings.

use crate::kb::KnowledgeBase;
use crate::normalize::{Lexicon, Normalizer};
use crate::smm::{load_smm, SemanticMetadataMapping};

pub const CONCEPTS: &str = include_str!("../data/concepts.tsv");
pub const TRIPLES: &str = include_str!("../data/triples.tsv");
pub const LEXICON: &str = include_str!("../data/lexicon.tsv");

pub fn knowledge_base() -> KnowledgeBase {
    KnowledgeBase::load(CONCEPTS, TRIPLES).expect("bundled knowledge base is valid")
}

pub fn lexicon() -> Lexicon {
    Lexicon::parse(LEXICON).expect("bundled lexicon is valid")
}

pub fn normalizer() -> Normalizer {
    Normalizer::new(lexicon(), &knowledge_base())
}

pub const SMM_DOCUMENTS: [(&str, &str); 4] = [
    ("figure_tall", include_str!("../data/smm/figure_tall.json")),
    ("figure_pivoted", include_str!("../data/smm/figure_pivoted.json")),
    ("omop_lite_tall", include_str!("../data/smm/omop_lite_tall.json")),
    ("omop_lite_pivoted", include_str!("../data/smm/omop_lite_pivoted.json")),
];

/// A bundled mapping by name.
pub fn smm(name: &str) -> Option<SemanticMetadataMapping> {
    let (_, doc) = SMM_DOCUMENTS.iter().find(|(n, _)| *n == name)?;
    Some(load_smm(doc, &knowledge_base()).expect("bundled mapping is valid").mapping)
}
