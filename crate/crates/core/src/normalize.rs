//! Lexicon-based concept normalization with semantic-type and tf-idf span
//! filtering, plus the LOINC-restricted lab path.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::kb::{CodeSystem, KnowledgeBase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("lexicon line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no LOINC-coded concept for `{0}`")]
    NoLoincMapping(String),
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexiconEntry {
    pub phrase: String,
    pub cui: String,
    pub semantic_types: BTreeSet<String>,
}

/// A lowercased token and its byte range in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextToken {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Lowercases and splits on whitespace and punctuation; each punctuation
/// character is kept as its own token, so `covid-19` gives `covid`, `-`,
/// `19`.
pub fn tokenize(text: &str) -> Vec<TextToken> {
    let mut out = Vec::new();
    let mut word: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            word.get_or_insert(i);
            continue;
        }
        if let Some(s) = word.take() {
            out.push(TextToken { text: text[s..i].to_lowercase(), start: s, end: i });
        }
        if !c.is_whitespace() {
            let end = i + c.len_utf8();
            out.push(TextToken { text: text[i..end].to_lowercase(), start: i, end });
        }
    }
    if let Some(s) = word {
        out.push(TextToken { text: text[s..].to_lowercase(), start: s, end: text.len() });
    }
    out
}

fn token_strings(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.text).collect()
}

/// Document frequencies of tokens over the distinct lexicon phrases.
#[derive(Debug, Clone, Default)]
pub struct TermStats {
    pub df: HashMap<String, usize>,
    pub total_phrases: usize,
}

impl TermStats {
    pub fn from_phrases<'a>(phrases: impl IntoIterator<Item = &'a [String]>) -> Self {
        let mut stats = TermStats::default();
        for tokens in phrases {
            stats.total_phrases += 1;
            let distinct: BTreeSet<&String> = tokens.iter().collect();
            for t in distinct {
                *stats.df.entry(t.clone()).or_insert(0) += 1;
            }
        }
        stats
    }

    pub fn idf(&self, token: &str) -> f64 {
        let n = self.total_phrases.max(1) as f64;
        match self.df.get(token) {
            Some(&df) => (n / df as f64).ln(),
            None => n.ln(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    /// phrase tokens -> entry indices
    by_phrase: HashMap<Vec<String>, Vec<usize>>,
    max_len: usize,
    stats: TermStats,
}

impl Lexicon {
    /// Parses `phrase<TAB>cui<TAB>semtypes` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, NormalizeError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 3 || cols[0].is_empty() || cols[1].is_empty() {
                return Err(NormalizeError::Parse {
                    line: i + 1,
                    message: "expected phrase, cui and semantic types".into(),
                });
            }
            entries.push(LexiconEntry {
                phrase: cols[0].to_lowercase(),
                cui: cols[1].to_string(),
                semantic_types: cols[2].split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
            });
        }
        Ok(Self::from_entries(entries))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NormalizeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| NormalizeError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn from_entries(entries: Vec<LexiconEntry>) -> Self {
        let mut by_phrase: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            let toks = token_strings(&e.phrase);
            if !toks.is_empty() {
                by_phrase.entry(toks).or_default().push(i);
            }
        }
        let max_len = by_phrase.keys().map(Vec::len).max().unwrap_or(0);
        let stats = TermStats::from_phrases(by_phrase.keys().map(Vec::as_slice));
        Lexicon { entries, by_phrase, max_len, stats }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn stats(&self) -> &TermStats {
        &self.stats
    }

    pub fn lookup(&self, tokens: &[String]) -> impl Iterator<Item = &LexiconEntry> {
        self.by_phrase.get(tokens).into_iter().flatten().map(|&i| &self.entries[i])
    }

    /// Greedy left-to-right longest-match segmentation. At each position the
    /// longest phrase with at least one entry accepted by `accept` wins;
    /// returns `(start, end)` token ranges with their accepted entries.
    pub fn longest_matches<'a>(
        &'a self,
        tokens: &[String],
        accept: impl Fn(&LexiconEntry) -> bool,
    ) -> Vec<(usize, usize, Vec<&'a LexiconEntry>)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let mut hit = None;
            for len in (1..=self.max_len.min(tokens.len() - i)).rev() {
                let found: Vec<&LexiconEntry> = self.lookup(&tokens[i..i + len]).filter(|e| accept(e)).collect();
                if !found.is_empty() {
                    hit = Some((len, found));
                    break;
                }
            }
            match hit {
                Some((len, found)) => {
                    out.push((i, i + len, found));
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateMatch {
    pub cui: String,
    pub semantic_types: BTreeSet<String>,
    pub matched_token_indices: BTreeSet<usize>,
    pub matched_tfidf: f64,
    pub unmatched_tfidf: f64,
}

/// Keeps a candidate unless the idf mass of its matched tokens is lower
/// than that of the span's unmatched tokens.
pub fn tfidf_filter(candidates: Vec<CandidateMatch>, span_tokens: &[String], stats: &TermStats) -> Vec<CandidateMatch> {
    candidates
        .into_iter()
        .filter_map(|mut c| {
            let (mut matched, mut unmatched) = (0.0, 0.0);
            for (i, t) in span_tokens.iter().enumerate() {
                if c.matched_token_indices.contains(&i) {
                    matched += stats.idf(t);
                } else {
                    unmatched += stats.idf(t);
                }
            }
            c.matched_tfidf = matched;
            c.unmatched_tfidf = unmatched;
            (matched >= unmatched).then_some(c)
        })
        .collect()
}

/// Semantic types a logical-form entity function may normalize to.
pub fn semtypes_for(function: &str) -> Option<&'static [&'static str]> {
    Some(match function {
        "cond" => &["dsyn", "neop", "mobd", "sosy", "fndg", "inpo", "acab", "cgab", "patf"],
        "obs" => &["fndg", "sosy", "inbe", "phsf", "orga", "clna", "dsyn", "menp"],
        "proc" => &["topp", "diap"],
        "drug" => &["phsu", "clnd", "antb"],
        "lab" => &["lbpr", "lbtr", "clna"],
        "allergy" => &["dsyn", "phsu", "orch", "fndg", "inpo"],
        _ => return None,
    })
}

/// Entity function used to tag a lexicon hit with these semantic types.
pub fn function_for_semtypes(semtypes: &BTreeSet<String>) -> Option<&'static str> {
    for f in ["lab", "proc", "drug", "cond", "obs"] {
        let allowed = semtypes_for(f).unwrap_or(&[]);
        // clna is shared by obs and lab; tag it as an observation
        if semtypes.iter().any(|s| allowed.contains(&s.as_str()) && !(f == "lab" && s == "clna")) {
            return Some(f);
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct Normalizer {
    lexicon: Lexicon,
    loinc: BTreeSet<String>,
    names: BTreeMap<String, String>,
}

impl Normalizer {
    pub fn new(lexicon: Lexicon, kb: &KnowledgeBase) -> Self {
        Normalizer {
            lexicon,
            loinc: kb.concepts().filter(|c| c.has_system(CodeSystem::Loinc)).map(|c| c.cui.clone()).collect(),
            names: kb.concepts().map(|c| (c.cui.clone(), c.preferred_name.clone())).collect(),
        }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn candidates(&self, tokens: &[String], accept: impl Fn(&LexiconEntry) -> bool) -> Vec<CandidateMatch> {
        let mut by_cui: BTreeMap<&str, CandidateMatch> = BTreeMap::new();
        for (s, e, entries) in self.lexicon.longest_matches(tokens, &accept) {
            for entry in entries {
                let c = by_cui.entry(&entry.cui).or_insert_with(|| CandidateMatch {
                    cui: entry.cui.clone(),
                    semantic_types: BTreeSet::new(),
                    matched_token_indices: BTreeSet::new(),
                    matched_tfidf: 0.0,
                    unmatched_tfidf: 0.0,
                });
                c.semantic_types.extend(entry.semantic_types.iter().cloned());
                c.matched_token_indices.extend(s..e);
            }
        }
        let mut out = tfidf_filter(by_cui.into_values().collect(), tokens, self.lexicon.stats());
        out.sort_by(|a, b| b.matched_tfidf.total_cmp(&a.matched_tfidf).then_with(|| a.cui.cmp(&b.cui)));
        out
    }

    /// Candidates for `text` whose semantic types intersect
    /// `allowed_semtypes` (an empty set allows everything), tf-idf filtered
    /// and ordered by matched score, then cui.
    pub fn normalize(&self, text: &str, allowed_semtypes: &BTreeSet<String>) -> Vec<CandidateMatch> {
        let tokens = token_strings(text);
        self.candidates(&tokens, |e| {
            allowed_semtypes.is_empty() || e.semantic_types.iter().any(|s| allowed_semtypes.contains(s))
        })
    }

    /// [`Normalizer::normalize`] with the semantic types of an entity function.
    pub fn normalize_for(&self, function: &str, text: &str) -> Vec<CandidateMatch> {
        let allowed = semtypes_for(function).map(|s| s.iter().map(|s| s.to_string()).collect()).unwrap_or_default();
        self.normalize(text, &allowed)
    }

    /// Best candidate whose concept carries a LOINC code.
    pub fn normalize_lab(&self, text: &str) -> Result<CandidateMatch, NormalizeError> {
        let tokens = token_strings(text);
        self.candidates(&tokens, |e| self.loinc.contains(&e.cui))
            .into_iter()
            .next()
            .ok_or_else(|| NormalizeError::NoLoincMapping(text.to_string()))
    }

    pub fn preferred_name(&self, cui: &str) -> Option<&str> {
        self.names.get(cui).map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(phrase: &str, cui: &str, st: &str) -> LexiconEntry {
        LexiconEntry { phrase: phrase.into(), cui: cui.into(), semantic_types: [st.to_string()].into() }
    }

    #[test]
    fn tokenization_keeps_punctuation() {
        let t: Vec<String> = tokenize("COVID-19 infection").into_iter().map(|t| t.text).collect();
        assert_eq!(t, ["covid", "-", "19", "infection"]);
        let toks = tokenize("a, b");
        assert_eq!((toks[1].start, toks[1].end), (1, 2));
    }

    #[test]
    fn idf_values() {
        let lex = Lexicon::from_entries(vec![entry("a b", "1", "x"), entry("a", "2", "x"), entry("c", "3", "x")]);
        let s = lex.stats();
        assert_eq!(s.total_phrases, 3);
        assert!((s.idf("a") - (3.0f64 / 2.0).ln()).abs() < 1e-12);
        assert!((s.idf("zzz") - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn longest_match_wins() {
        let lex = Lexicon::from_entries(vec![entry("diabetes", "D", "dsyn"), entry("diabetes mellitus", "DM", "dsyn")]);
        let toks = token_strings("diabetes mellitus type");
        let m = lex.longest_matches(&toks, |_| true);
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].0, m[0].1), (0, 2));
        assert_eq!(m[0].2[0].cui, "DM");
    }

    #[test]
    fn unknown_token_gives_nothing() {
        let kb = KnowledgeBase::default();
        let n = Normalizer::new(Lexicon::from_entries(vec![entry("a", "A", "dsyn")]), &kb);
        assert!(n.normalize("zzz", &BTreeSet::new()).is_empty());
    }
}
