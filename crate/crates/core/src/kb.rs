//! In-memory biomedical triple store with subsumption closure and
//! parameterized graph-query templates.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("{file} line {line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{file} line {line}: unknown predicate `{predicate}`")]
    UnknownPredicate { file: String, line: usize, predicate: String },
    #[error("isa cycle: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("unknown concept {0}")]
    UnknownConcept(String),
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("template {template} expects {expected} bindings")]
    BindingMismatch { template: Template, expected: &'static str },
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CodeSystem {
    #[serde(rename = "ICD10")]
    Icd10,
    #[serde(rename = "SNOMED")]
    Snomed,
    #[serde(rename = "LOINC")]
    Loinc,
    #[serde(rename = "RXNORM")]
    RxNorm,
}

impl CodeSystem {
    pub const ALL: [CodeSystem; 4] = [CodeSystem::Icd10, CodeSystem::Snomed, CodeSystem::Loinc, CodeSystem::RxNorm];

    pub fn as_str(self) -> &'static str {
        match self {
            CodeSystem::Icd10 => "ICD10",
            CodeSystem::Snomed => "SNOMED",
            CodeSystem::Loinc => "LOINC",
            CodeSystem::RxNorm => "RXNORM",
        }
    }
}

impl fmt::Display for CodeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CodeSystem::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown code system `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Code {
    pub system: CodeSystem,
    pub code: String,
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.system, self.code)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub cui: String,
    pub preferred_name: String,
    pub semantic_types: BTreeSet<String>,
    pub codes: BTreeSet<Code>,
}

impl Concept {
    pub fn new(cui: impl Into<String>, name: impl Into<String>) -> Self {
        Concept {
            cui: cui.into(),
            preferred_name: name.into(),
            semantic_types: BTreeSet::new(),
            codes: BTreeSet::new(),
        }
    }

    pub fn codes_in(&self, system: CodeSystem) -> impl Iterator<Item = &str> {
        self.codes.iter().filter(move |c| c.system == system).map(|c| c.code.as_str())
    }

    pub fn has_system(&self, system: CodeSystem) -> bool {
        self.codes.iter().any(|c| c.system == system)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Isa,
    Treats,
    ContraindicatedWith,
    Affects,
    HasSymptom,
    LabMapsToPhenotype,
}

impl Predicate {
    pub fn as_str(self) -> &'static str {
        match self {
            Predicate::Isa => "isa",
            Predicate::Treats => "treats",
            Predicate::ContraindicatedWith => "contraindicated_with",
            Predicate::Affects => "affects",
            Predicate::HasSymptom => "has_symptom",
            Predicate::LabMapsToPhenotype => "lab_maps_to_phenotype",
        }
    }
}

impl FromStr for Predicate {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "isa" => Predicate::Isa,
            "treats" => Predicate::Treats,
            "contraindicated_with" => Predicate::ContraindicatedWith,
            "affects" => Predicate::Affects,
            "has_symptom" => Predicate::HasSymptom,
            "lab_maps_to_phenotype" => Predicate::LabMapsToPhenotype,
            _ => return Err(()),
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const LAB_FLAGS: [&str; 4] = ["high", "low", "abnormal", "normal"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub predicate: Predicate,
    pub object: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<String>,
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: Predicate, object: impl Into<String>) -> Self {
        Triple { subject: subject.into(), predicate, object: object.into(), qualifier: None }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)?;
        if let Some(q) = &self.qualifier {
            write!(f, " ({q})")?;
        }
        Ok(())
    }
}

/// How a member entered a [`ConceptSet`]: the rule that produced it and the
/// chain of triples walked from the query input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub cui: String,
    pub rule: String,
    pub path: Vec<Triple>,
}

impl Provenance {
    fn key(&self) -> (usize, Vec<String>) {
        (self.path.len(), self.path.iter().map(|t| t.to_string()).collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptSet {
    pub members: BTreeSet<String>,
    /// Every member's shortest derivations, grouped by cui in cui order.
    pub provenance: Vec<Provenance>,
}

impl ConceptSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Members that were supplied directly rather than derived.
    pub fn seeded<I, S>(cuis: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut b = SetBuilder::default();
        for c in cuis {
            b.offer(Provenance { cui: c.into(), rule: "given".into(), path: Vec::new() });
        }
        b.finish()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, cui: &str) -> bool {
        self.members.contains(cui)
    }

    /// The primary (first) derivation of `cui`.
    pub fn provenance_of(&self, cui: &str) -> Option<&Provenance> {
        self.paths_of(cui).first()
    }

    pub fn paths_of(&self, cui: &str) -> &[Provenance] {
        let lo = self.provenance.partition_point(|p| p.cui.as_str() < cui);
        let hi = self.provenance.partition_point(|p| p.cui.as_str() <= cui);
        &self.provenance[lo..hi]
    }

    pub fn union(&self, other: &ConceptSet) -> ConceptSet {
        let mut b = SetBuilder::default();
        for p in self.provenance.iter().chain(&other.provenance) {
            b.offer(p.clone());
        }
        b.finish()
    }
}

/// Shortest-path alternatives kept per member.
pub const MAX_PATHS: usize = 16;

/// Accumulates provenance, keeping every shortest path per member (up to
/// [`MAX_PATHS`], in rendered-triple order).
#[derive(Default)]
struct SetBuilder {
    best: BTreeMap<String, Vec<Provenance>>,
}

impl SetBuilder {
    fn offer(&mut self, p: Provenance) {
        let entry = self.best.entry(p.cui.clone()).or_default();
        match entry.first().map(|cur| cur.path.len().cmp(&p.path.len())) {
            Some(std::cmp::Ordering::Less) => {}
            Some(std::cmp::Ordering::Greater) | None => *entry = vec![p],
            Some(std::cmp::Ordering::Equal) => {
                let key = p.key();
                if let Err(i) = entry.binary_search_by(|q| q.key().cmp(&key)) {
                    entry.insert(i, p);
                    entry.truncate(MAX_PATHS);
                }
            }
        }
    }

    fn finish(self) -> ConceptSet {
        ConceptSet {
            members: self.best.keys().cloned().collect(),
            provenance: self.best.into_values().flatten().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    DrugsTreating,
    ContraindicationsForDrugs,
    ConditionsAffecting,
    SymptomsOf,
    PhenotypesForLab,
}

impl Template {
    pub const ALL: [Template; 5] = [
        Template::DrugsTreating,
        Template::ContraindicationsForDrugs,
        Template::ConditionsAffecting,
        Template::SymptomsOf,
        Template::PhenotypesForLab,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Template::DrugsTreating => "drugs_treating",
            Template::ContraindicationsForDrugs => "contraindications_for_drugs",
            Template::ConditionsAffecting => "conditions_affecting",
            Template::SymptomsOf => "symptoms_of",
            Template::PhenotypesForLab => "phenotypes_for_lab",
        }
    }

    /// The predicate walked and whether the input binds its object (so the
    /// result is the subject) or its subject.
    fn edge(self) -> (Predicate, bool) {
        match self {
            Template::DrugsTreating => (Predicate::Treats, true),
            Template::ContraindicationsForDrugs => (Predicate::ContraindicatedWith, false),
            Template::ConditionsAffecting => (Predicate::Affects, true),
            Template::SymptomsOf => (Predicate::HasSymptom, false),
            Template::PhenotypesForLab => (Predicate::LabMapsToPhenotype, false),
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Template {
    type Err = KbError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Template::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| KbError::UnknownTemplate(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Bindings<'a> {
    Concepts(&'a ConceptSet),
    Concept(&'a str),
    Lab { loinc: &'a str, flag: &'a str },
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    concepts: BTreeMap<String, Concept>,
    triples: Vec<Triple>,
    /// (predicate, subject) -> triple indices
    by_subject: HashMap<(Predicate, String), Vec<usize>>,
    /// (predicate, object) -> triple indices
    by_object: HashMap<(Predicate, String), Vec<usize>>,
}

fn io_err(path: &Path, e: std::io::Error) -> KbError {
    KbError::Io { path: path.display().to_string(), message: e.to_string() }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

/// Parses the concept declaration file:
/// `cui<TAB>name<TAB>semtypes(comma-sep)<TAB>codes(SYSTEM:code;...)`.
pub fn parse_concepts(text: &str, file: &str) -> Result<Vec<Concept>, KbError> {
    let mut out = Vec::new();
    for (line, l) in data_lines(text) {
        let err = |message: String| KbError::Parse { file: file.to_string(), line, message };
        let cols: Vec<&str> = l.split('\t').collect();
        if cols.len() < 2 || cols.len() > 4 {
            return Err(err(format!("expected 2 to 4 tab-separated columns, found {}", cols.len())));
        }
        let mut c = Concept::new(cols[0].trim(), cols[1].trim());
        if c.cui.is_empty() {
            return Err(err("empty cui".into()));
        }
        if let Some(st) = cols.get(2) {
            c.semantic_types = st.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
        }
        if let Some(codes) = cols.get(3) {
            for item in codes.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let (sys, code) = item.split_once(':').ok_or_else(|| err(format!("malformed code `{item}`")))?;
                let system = sys.parse().map_err(err)?;
                c.codes.insert(Code { system, code: code.to_string() });
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Parses the triple file: `subject<TAB>predicate<TAB>object[<TAB>qualifier]`.
pub fn parse_triples(text: &str, file: &str) -> Result<Vec<Triple>, KbError> {
    let mut out = Vec::new();
    for (line, l) in data_lines(text) {
        let cols: Vec<&str> = l.split('\t').map(str::trim).collect();
        if cols.len() < 3 || cols.len() > 4 {
            return Err(KbError::Parse {
                file: file.to_string(),
                line,
                message: format!("expected 3 or 4 tab-separated columns, found {}", cols.len()),
            });
        }
        let predicate = cols[1].parse().map_err(|_| KbError::UnknownPredicate {
            file: file.to_string(),
            line,
            predicate: cols[1].to_string(),
        })?;
        let qualifier = cols.get(3).filter(|q| !q.is_empty()).map(|q| q.to_string());
        if predicate == Predicate::LabMapsToPhenotype {
            match &qualifier {
                Some(q) if LAB_FLAGS.contains(&q.as_str()) => {}
                _ => {
                    return Err(KbError::Parse {
                        file: file.to_string(),
                        line,
                        message: format!("lab_maps_to_phenotype needs a qualifier in {LAB_FLAGS:?}"),
                    })
                }
            }
        }
        out.push(Triple { subject: cols[0].to_string(), predicate, object: cols[2].to_string(), qualifier });
    }
    Ok(out)
}

impl KnowledgeBase {
    /// Loads the concept and triple documents. Every triple endpoint must be
    /// declared and `isa` must be acyclic.
    pub fn load(concepts_text: &str, triples_text: &str) -> Result<Self, KbError> {
        let concepts = parse_concepts(concepts_text, "concepts")?;
        let triples = parse_triples(triples_text, "triples")?;
        // report dangling references with their triple-file line
        let declared: BTreeSet<&str> = concepts.iter().map(|c| c.cui.as_str()).collect();
        for ((line, _), t) in data_lines(triples_text).zip(&triples) {
            for cui in [&t.subject, &t.object] {
                if !declared.contains(cui.as_str()) {
                    return Err(KbError::Parse {
                        file: "triples".into(),
                        line,
                        message: format!("undeclared concept {cui}"),
                    });
                }
            }
        }
        Self::from_parts(concepts, triples)
    }

    pub fn load_files(concepts: impl AsRef<Path>, triples: impl AsRef<Path>) -> Result<Self, KbError> {
        let (cp, tp) = (concepts.as_ref(), triples.as_ref());
        let ct = std::fs::read_to_string(cp).map_err(|e| io_err(cp, e))?;
        let tt = std::fs::read_to_string(tp).map_err(|e| io_err(tp, e))?;
        Self::load(&ct, &tt)
    }

    pub fn from_parts(concepts: Vec<Concept>, triples: Vec<Triple>) -> Result<Self, KbError> {
        let mut kb = KnowledgeBase::default();
        for c in concepts {
            if kb.concepts.contains_key(&c.cui) {
                return Err(KbError::Parse {
                    file: "concepts".into(),
                    line: 0,
                    message: format!("duplicate cui {}", c.cui),
                });
            }
            kb.concepts.insert(c.cui.clone(), c);
        }
        for t in triples {
            for cui in [&t.subject, &t.object] {
                if !kb.concepts.contains_key(cui) {
                    return Err(KbError::UnknownConcept(cui.clone()));
                }
            }
            let i = kb.triples.len();
            kb.by_subject.entry((t.predicate, t.subject.clone())).or_default().push(i);
            kb.by_object.entry((t.predicate, t.object.clone())).or_default().push(i);
            kb.triples.push(t);
        }
        for list in kb.by_subject.values_mut().chain(kb.by_object.values_mut()) {
            list.sort_by(|&a, &b| kb.triples[a].cmp(&kb.triples[b]));
        }
        kb.check_acyclic()?;
        Ok(kb)
    }

    fn check_acyclic(&self) -> Result<(), KbError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: HashMap<&str, Mark> = HashMap::new();
        for start in self.concepts.keys() {
            if marks.contains_key(start.as_str()) {
                continue;
            }
            // iterative DFS over child -> parent edges
            let mut stack: Vec<(&str, Vec<&str>)> = vec![(start, self.parents(start))];
            marks.insert(start, Mark::Open);
            while let Some((node, pending)) = stack.last_mut() {
                let node = *node;
                match pending.pop() {
                    Some(next) => match marks.get(next) {
                        Some(Mark::Open) => {
                            let mut cycle: Vec<String> =
                                stack.iter().map(|(n, _)| n.to_string()).skip_while(|n| n != next).collect();
                            cycle.push(next.to_string());
                            return Err(KbError::CycleDetected(cycle));
                        }
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(next, Mark::Open);
                            stack.push((next, self.parents(next)));
                        }
                    },
                    None => {
                        marks.insert(node, Mark::Done);
                        stack.pop();
                    }
                }
            }
        }
        Ok(())
    }

    pub fn concept(&self, cui: &str) -> Option<&Concept> {
        self.concepts.get(cui)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    fn require(&self, cui: &str) -> Result<&Concept, KbError> {
        self.concepts.get(cui).ok_or_else(|| KbError::UnknownConcept(cui.to_string()))
    }

    fn outgoing(&self, p: Predicate, subject: &str) -> impl Iterator<Item = &Triple> {
        self.by_subject.get(&(p, subject.to_string())).into_iter().flatten().map(|&i| &self.triples[i])
    }

    fn incoming(&self, p: Predicate, object: &str) -> impl Iterator<Item = &Triple> {
        self.by_object.get(&(p, object.to_string())).into_iter().flatten().map(|&i| &self.triples[i])
    }

    pub fn parents(&self, cui: &str) -> Vec<&str> {
        self.outgoing(Predicate::Isa, cui).map(|t| t.object.as_str()).collect()
    }

    pub fn children(&self, cui: &str) -> Vec<&str> {
        self.incoming(Predicate::Isa, cui).map(|t| t.subject.as_str()).collect()
    }

    /// Reflexive-transitive closure over reversed `isa` edges. Each member's
    /// provenance is its shortest `isa` chain up to `cui`.
    pub fn descendants(&self, cui: &str) -> Result<ConceptSet, KbError> {
        self.require(cui)?;
        let mut best: BTreeMap<String, Provenance> = BTreeMap::new();
        best.insert(cui.to_string(), Provenance { cui: cui.to_string(), rule: "self".into(), path: vec![] });
        let mut queue = VecDeque::from([cui.to_string()]);
        while let Some(node) = queue.pop_front() {
            let base = best[&node].path.clone();
            for t in self.incoming(Predicate::Isa, &node) {
                if best.contains_key(&t.subject) {
                    continue;
                }
                let mut path = vec![t.clone()];
                path.extend(base.iter().cloned());
                best.insert(t.subject.clone(), Provenance { cui: t.subject.clone(), rule: "descendant".into(), path });
                queue.push_back(t.subject.clone());
            }
        }
        Ok(ConceptSet { members: best.keys().cloned().collect(), provenance: best.into_values().collect() })
    }

    /// True if `cui` equals `ancestor` or reaches it through `isa` edges.
    pub fn is_a(&self, cui: &str, ancestor: &str) -> bool {
        if cui == ancestor {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![cui];
        while let Some(n) = stack.pop() {
            for p in self.parents(n) {
                if p == ancestor {
                    return true;
                }
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        false
    }

    /// Runs a single-hop template, unioned over the bound input set.
    pub fn query(&self, template: Template, bindings: Bindings<'_>) -> Result<ConceptSet, KbError> {
        if template == Template::PhenotypesForLab {
            let Bindings::Lab { loinc, flag } = bindings else {
                return Err(KbError::BindingMismatch { template, expected: "lab" });
            };
            return Ok(self.phenotypes_for_lab(loinc, flag));
        }
        let owned;
        let input = match bindings {
            Bindings::Concepts(s) => s,
            Bindings::Concept(c) => {
                owned = ConceptSet::seeded([c]);
                &owned
            }
            Bindings::Lab { .. } => return Err(KbError::BindingMismatch { template, expected: "concept" }),
        };
        for m in &input.members {
            self.require(m)?;
        }
        let (pred, input_is_object) = template.edge();
        let mut b = SetBuilder::default();
        for p in &input.provenance {
            let hits: Vec<&Triple> = if input_is_object {
                self.incoming(pred, &p.cui).collect()
            } else {
                self.outgoing(pred, &p.cui).collect()
            };
            for t in hits {
                let cui = if input_is_object { &t.subject } else { &t.object };
                let mut path = p.path.clone();
                path.push(t.clone());
                b.offer(Provenance { cui: cui.clone(), rule: template.as_str().into(), path });
            }
        }
        Ok(b.finish())
    }

    pub fn drugs_treating(&self, conditions: &ConceptSet) -> Result<ConceptSet, KbError> {
        self.query(Template::DrugsTreating, Bindings::Concepts(conditions))
    }

    pub fn contraindications_for_drugs(&self, drugs: &ConceptSet) -> Result<ConceptSet, KbError> {
        self.query(Template::ContraindicationsForDrugs, Bindings::Concepts(drugs))
    }

    pub fn conditions_affecting(&self, function_cui: &str) -> Result<ConceptSet, KbError> {
        self.query(Template::ConditionsAffecting, Bindings::Concept(function_cui))
    }

    pub fn symptoms_of(&self, conditions: &ConceptSet) -> Result<ConceptSet, KbError> {
        self.query(Template::SymptomsOf, Bindings::Concepts(conditions))
    }

    /// Phenotypes recorded for labs carrying LOINC `loinc` with outcome `flag`.
    /// An unknown code yields an empty set.
    pub fn phenotypes_for_lab(&self, loinc: &str, flag: &str) -> ConceptSet {
        let mut b = SetBuilder::default();
        for t in &self.triples {
            if t.predicate != Predicate::LabMapsToPhenotype || t.qualifier.as_deref() != Some(flag) {
                continue;
            }
            let coded = self.concepts[&t.subject].codes_in(CodeSystem::Loinc).any(|c| c == loinc);
            if coded {
                b.offer(Provenance {
                    cui: t.object.clone(),
                    rule: Template::PhenotypesForLab.as_str().into(),
                    path: vec![t.clone()],
                });
            }
        }
        b.finish()
    }

    /// conditions_affecting, then drugs_treating, then
    /// contraindications_for_drugs; provenance keeps the full chain.
    pub fn contraindications_to_drugs_for_conditions_affecting(
        &self,
        function_cui: &str,
    ) -> Result<ConceptSet, KbError> {
        let conditions = self.conditions_affecting(function_cui)?;
        let drugs = self.drugs_treating(&conditions)?;
        self.contraindications_for_drugs(&drugs)
    }

    /// Case-insensitive search over preferred names and cuis, best matches
    /// (prefix hits) first.
    pub fn search(&self, q: &str, limit: usize) -> Vec<&Concept> {
        let q = q.trim().to_lowercase();
        if q.is_empty() {
            return Vec::new();
        }
        let mut hits: Vec<(bool, &Concept)> = self
            .concepts
            .values()
            .filter_map(|c| {
                let name = c.preferred_name.to_lowercase();
                if c.cui.to_lowercase() == q || name.starts_with(&q) {
                    Some((false, c))
                } else if name.contains(&q) {
                    Some((true, c))
                } else {
                    None
                }
            })
            .collect();
        hits.sort_by(|a, b| (a.0, &a.1.preferred_name).cmp(&(b.0, &b.1.preferred_name)));
        hits.into_iter().take(limit).map(|(_, c)| c).collect()
    }
}
