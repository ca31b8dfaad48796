use std::collections::BTreeSet;

use lfq_core::fixture;
use lfq_core::kb::CodeSystem;
use lfq_core::normalize::{tfidf_filter, CandidateMatch, Lexicon, LexiconEntry, NormalizeError, TermStats};
use proptest::prelude::*;

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn semantic_type_filter_drops_homonyms() {
    let n = fixture::normalizer();
    let t2dm: Vec<String> = n.normalize("type 2 diabetes", &set(&["dsyn"])).into_iter().map(|c| c.cui).collect();
    assert_eq!(t2dm, ["C0011860"]);
    let unfiltered = n.normalize("type 2 diabetes", &BTreeSet::new());
    assert_eq!(unfiltered.len(), 2);

    let bmi: Vec<String> = n.normalize_for("obs", "BMI").into_iter().map(|c| c.cui).collect();
    assert_eq!(bmi, ["C1305855"]);
    assert!(n.normalize("BMI", &BTreeSet::new()).iter().any(|c| c.cui == "C0910133"));
}

#[test]
fn tfidf_removes_generic_infection() {
    let n = fixture::normalizer();
    let got = n.normalize("covid-19 infection", &set(&["dsyn"]));
    let cuis: Vec<&str> = got.iter().map(|c| c.cui.as_str()).collect();
    assert!(cuis.contains(&"C5203670"), "{cuis:?}");
    assert!(!cuis.contains(&"C3714514"), "{cuis:?}");
    let covid = &got[0];
    assert_eq!(covid.matched_token_indices, BTreeSet::from([0, 1, 2]));
    assert!(covid.matched_tfidf >= covid.unmatched_tfidf);
}

#[test]
fn lab_normalization_targets_loinc() {
    let n = fixture::normalizer();
    let kb = fixture::knowledge_base();
    let loinc =
        |cui: &str| -> Vec<String> { kb.concept(cui).unwrap().codes_in(CodeSystem::Loinc).map(String::from).collect() };
    let platelets = n.normalize_lab("platelet count").unwrap();
    assert_eq!(platelets.cui, "C0362994");
    assert_eq!(loinc(&platelets.cui), ["777-3"]);
    let creat = n.normalize_lab("serum creatinine").unwrap();
    assert_eq!(loinc(&creat.cui), ["2160-0"]);
    assert_eq!(n.normalize_lab("resuscitation"), Err(NormalizeError::NoLoincMapping("resuscitation".into())));
}

#[test]
fn deterministic() {
    let n = fixture::normalizer();
    for text in ["covid-19 infection", "sleep disorder", "type 2 diabetes with kidney complications"] {
        assert_eq!(n.normalize(text, &BTreeSet::new()), n.normalize(text, &BTreeSet::new()));
    }
}

fn brute_force_keep(c: &CandidateMatch, tokens: &[String], stats: &TermStats) -> bool {
    let mut m = 0.0;
    let mut u = 0.0;
    for (i, t) in tokens.iter().enumerate() {
        let df = tokens_df(stats, t);
        let idf =
            if df == 0 { (stats.total_phrases as f64).ln() } else { (stats.total_phrases as f64 / df as f64).ln() };
        if c.matched_token_indices.contains(&i) {
            m += idf;
        } else {
            u += idf;
        }
    }
    m >= u
}

fn tokens_df(stats: &TermStats, t: &str) -> usize {
    stats.df.get(t).copied().unwrap_or(0)
}

proptest! {
    #[test]
    fn filter_matches_brute_force(
        phrases in prop::collection::vec(prop::collection::vec("[a-e]", 1..4), 1..30),
        span in prop::collection::vec("[a-f]", 1..8),
        picks in prop::collection::vec(prop::collection::btree_set(0usize..8, 0..8), 1..6),
    ) {
        let entries: Vec<LexiconEntry> = phrases
            .iter()
            .enumerate()
            .map(|(i, p)| LexiconEntry { phrase: p.join(" "), cui: format!("C{i}"), semantic_types: BTreeSet::new() })
            .collect();
        let lex = Lexicon::from_entries(entries);
        let candidates: Vec<CandidateMatch> = picks
            .iter()
            .enumerate()
            .map(|(i, idx)| CandidateMatch {
                cui: format!("X{i}"),
                semantic_types: BTreeSet::new(),
                matched_token_indices: idx.iter().copied().filter(|&j| j < span.len()).collect(),
                matched_tfidf: 0.0,
                unmatched_tfidf: 0.0,
            })
            .collect();
        let kept = tfidf_filter(candidates.clone(), &span, lex.stats());
        let expected: Vec<String> = candidates
            .iter()
            .filter(|c| brute_force_keep(c, &span, lex.stats()))
            .map(|c| c.cui.clone())
            .collect();
        let got: Vec<String> = kept.iter().map(|c| c.cui.clone()).collect();
        prop_assert_eq!(got, expected);
        for c in &candidates {
            if c.matched_token_indices.len() == span.len() {
                prop_assert!(kept.iter().any(|k| k.cui == c.cui));
            }
        }
    }
}
