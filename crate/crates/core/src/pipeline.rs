//! End-to-end query generation: text or logical forms in, per-line SQL with
//! explanations out.

use std::collections::BTreeMap;
use std::time::Instant;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codegen::{compile_line, CompileOptions, LineStatus, PlanLine, QueryPlan, SkipKind, SkipReason};
use crate::fixture;
use crate::frontend::Frontend;
use crate::kb::{ConceptSet, KnowledgeBase};
use crate::llf::{parse, serialize, validate, Criterion, FunctionCatalog, LfNode, Polarity};
use crate::normalize::{Lexicon, Normalizer};
use crate::reason::{apply_override, explain, Explanation, ReasonedNode, Reasoner};
use crate::smm::SemanticMetadataMapping;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("unknown mapping `{0}`")]
    UnknownSmm(String),
    #[error("request has no criteria")]
    EmptyRequest,
    #[error("line {line}: malformed logical form: {message}")]
    MalformedLogicalForm { line: usize, position: Option<usize>, message: String },
    #[error("line {line}: invalid override: {message}")]
    InvalidOverride { line: usize, message: String },
}

impl PipelineError {
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::UnknownSmm(_) => "UnknownSmm",
            PipelineError::EmptyRequest => "EmptyRequest",
            PipelineError::MalformedLogicalForm { .. } => "MalformedLogicalForm",
            PipelineError::InvalidOverride { .. } => "InvalidOverride",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputMode {
    #[default]
    RawText,
    Augmented,
    LogicalForm,
}

/// Replaces the concepts of the entity at `path` (see
/// [`ReasonedNode::at_path`]) on line `line`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Override {
    pub line: usize,
    #[serde(default)]
    pub path: String,
    pub cuis: Vec<String>,
    #[serde(default)]
    pub expand: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRequest {
    #[serde(default)]
    pub inclusion: Vec<String>,
    #[serde(default)]
    pub exclusion: Vec<String>,
    #[serde(default)]
    pub input_mode: InputMode,
    pub smm_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin_date: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<Override>,
    /// Report per-stage timings; off by default so identical requests give
    /// identical responses.
    #[serde(default)]
    pub timing: bool,
}

impl QueryRequest {
    pub fn new(smm_name: impl Into<String>, input_mode: InputMode) -> Self {
        QueryRequest {
            inclusion: Vec::new(),
            exclusion: Vec::new(),
            input_mode,
            smm_name: smm_name.into(),
            pin_date: None,
            overrides: Vec::new(),
            timing: false,
        }
    }

    /// Criteria lines numbered from 1, inclusions first.
    pub fn lines(&self) -> Vec<(usize, Polarity, &str)> {
        self.inclusion
            .iter()
            .map(|t| (Polarity::Inclusion, t.as_str()))
            .chain(self.exclusion.iter().map(|t| (Polarity::Exclusion, t.as_str())))
            .enumerate()
            .map(|(i, (p, t))| (i + 1, p, t))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseLine {
    pub line_number: usize,
    pub polarity: Polarity,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmented_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical_form: Option<String>,
    pub status: LineStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<SkipReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<Explanation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sql: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub lines: Vec<ResponseLine>,
    pub plan: QueryPlan,
    pub plan_id: String,
    /// Milliseconds per stage, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

/// Stable identifier of a plan: SHA-256 of its JSON serialization.
pub fn plan_id(plan: &QueryPlan) -> String {
    let json = serde_json::to_string(plan).expect("plans serialize");
    hex::encode(Sha256::digest(json.as_bytes()))
}

/// Shared read-only state for query generation.
pub struct Engine {
    kb: KnowledgeBase,
    normalizer: Normalizer,
    lexicon: Lexicon,
    catalog: FunctionCatalog,
    smms: BTreeMap<String, SemanticMetadataMapping>,
}

#[derive(Default)]
struct Timer {
    stages: BTreeMap<String, f64>,
}

impl Timer {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.stages.entry(stage.to_string()).or_default() += start.elapsed().as_secs_f64() * 1000.0;
        out
    }
}

struct Line {
    number: usize,
    polarity: Polarity,
    raw: String,
    augmented: Option<String>,
    form: Result<LfNode, SkipReason>,
}

impl Engine {
    pub fn new(
        kb: KnowledgeBase,
        lexicon: Lexicon,
        catalog: FunctionCatalog,
        smms: impl IntoIterator<Item = SemanticMetadataMapping>,
    ) -> Self {
        let normalizer = Normalizer::new(lexicon.clone(), &kb);
        Engine { kb, normalizer, lexicon, catalog, smms: smms.into_iter().map(|s| (s.name.clone(), s)).collect() }
    }

    /// The bundled knowledge base, lexicon and mappings.
    pub fn fixture() -> Self {
        let smms = fixture::SMM_DOCUMENTS.iter().filter_map(|(n, _)| fixture::smm(n));
        Engine::new(fixture::knowledge_base(), fixture::lexicon(), FunctionCatalog::builtin(), smms)
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn catalog(&self) -> &FunctionCatalog {
        &self.catalog
    }

    pub fn smm(&self, name: &str) -> Option<&SemanticMetadataMapping> {
        self.smms.get(name)
    }

    pub fn smms(&self) -> impl Iterator<Item = &SemanticMetadataMapping> {
        self.smms.values()
    }

    pub fn frontend(&self) -> Frontend<'_> {
        Frontend::new(&self.lexicon, &self.catalog)
    }

    pub fn reason(&self, lf: &LfNode) -> ReasonedNode {
        Reasoner::new(&self.kb, &self.normalizer).reason(lf)
    }

    pub fn generate(&self, request: &QueryRequest) -> Result<QueryResponse, PipelineError> {
        let smm = self.smm(&request.smm_name).ok_or_else(|| PipelineError::UnknownSmm(request.smm_name.clone()))?;
        let entries = request.lines();
        if entries.is_empty() {
            return Err(PipelineError::EmptyRequest);
        }
        for o in &request.overrides {
            if o.line == 0 || o.line > entries.len() {
                return Err(PipelineError::InvalidOverride { line: o.line, message: "no such line".into() });
            }
            if let Some(c) = o.cuis.iter().find(|c| self.kb.concept(c).is_none()) {
                return Err(PipelineError::InvalidOverride { line: o.line, message: format!("unknown concept `{c}`") });
            }
        }
        let mut timer = Timer::default();
        let lines = timer.time("translate", || self.forms(request.input_mode, &entries))?;
        let options = CompileOptions { pin_date: request.pin_date };
        let mut out = Vec::new();
        let mut plan_lines = Vec::new();
        for line in lines {
            let logical_form = line.form.as_ref().ok().map(|lf| serialize(lf, false));
            let mut response = ResponseLine {
                line_number: line.number,
                polarity: line.polarity,
                raw_text: line.raw,
                augmented_text: line.augmented,
                logical_form,
                status: LineStatus::Skipped,
                reason: None,
                explanation: None,
                sql: None,
            };
            let plan_line = match line.form {
                Err(reason) => {
                    response.reason = Some(reason.clone());
                    PlanLine::skipped(line.number, line.polarity, reason.kind, reason.detail)
                }
                Ok(lf) => {
                    let mut node = timer.time("reason", || self.reason(&lf));
                    for o in request.overrides.iter().filter(|o| o.line == line.number) {
                        let set = ConceptSet::seeded(o.cuis.iter().cloned());
                        node = apply_override(&node, &o.path, &set, o.expand, &self.kb)
                            .map_err(|e| PipelineError::InvalidOverride { line: o.line, message: e.to_string() })?;
                    }
                    response.explanation = Some(explain(&node, &self.kb));
                    match timer.time("compile", || compile_line(&node, smm, &self.kb, &options)) {
                        Ok(c) => PlanLine {
                            line_number: line.number,
                            polarity: line.polarity,
                            status: LineStatus::Executed,
                            reason: None,
                            sql: Some(c.sql),
                            concepts_used: c.concepts_used,
                        },
                        Err(e) => PlanLine::skipped(line.number, line.polarity, e.skip_kind(), e.detail()),
                    }
                }
            };
            response.status = plan_line.status;
            response.reason = plan_line.reason.clone();
            response.sql = plan_line.sql.clone();
            out.push(response);
            plan_lines.push(plan_line);
        }
        let plan = QueryPlan { smm: smm.name.clone(), pin_date: request.pin_date, lines: plan_lines };
        Ok(QueryResponse { lines: out, plan_id: plan_id(&plan), plan, timing: request.timing.then_some(timer.stages) })
    }

    fn forms(&self, mode: InputMode, entries: &[(usize, Polarity, &str)]) -> Result<Vec<Line>, PipelineError> {
        let fe = self.frontend();
        let not_translatable = |detail: String| SkipReason { kind: SkipKind::NotTranslatable, detail };
        entries
            .iter()
            .map(|&(number, polarity, text)| {
                let (augmented, form) = match mode {
                    InputMode::RawText => {
                        let a = fe.augment(text);
                        let form = fe.translate(&a.augmented, polarity).map_err(|e| not_translatable(e.reason));
                        (Some(a.augmented), form)
                    }
                    InputMode::Augmented => {
                        (None, fe.translate(text, polarity).map_err(|e| not_translatable(e.reason)))
                    }
                    InputMode::LogicalForm => {
                        let lf = parse(text, &self.catalog).map_err(|e| PipelineError::MalformedLogicalForm {
                            line: number,
                            position: e.position(),
                            message: e.to_string(),
                        })?;
                        if let Some(d) = validate(&lf, &self.catalog).into_iter().next() {
                            return Err(PipelineError::MalformedLogicalForm {
                                line: number,
                                position: None,
                                message: d.message,
                            });
                        }
                        (None, Ok(lf))
                    }
                };
                Ok(Line { number, polarity, raw: text.to_string(), augmented, form })
            })
            .collect()
    }

    /// Reasoned nodes for annotated criteria, `None` where a line has no
    /// logical form.
    pub fn reason_criteria(&self, criteria: &[Criterion]) -> Vec<Option<ReasonedNode>> {
        criteria.iter().map(|c| c.logical_form.as_ref().map(|lf| self.reason(lf))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(mode: InputMode, inc: &[&str], exc: &[&str]) -> QueryRequest {
        let mut r = QueryRequest::new("omop_lite_tall", mode);
        r.inclusion = inc.iter().map(|s| s.to_string()).collect();
        r.exclusion = exc.iter().map(|s| s.to_string()).collect();
        r
    }

    #[test]
    fn diabetes_example() {
        let engine = Engine::fixture();
        let r = request(
            InputMode::LogicalForm,
            &[r#"intersect(cond("Diabetic"), union(female(), male()), age().num_filter(eq(op(GT), val("65"))))"#],
            &[],
        );
        let resp = engine.generate(&r).unwrap();
        assert_eq!(resp.lines.len(), 1);
        assert_eq!(resp.lines[0].status, LineStatus::Executed);
        assert!(resp.lines[0].sql.is_some());
        assert!(resp.lines[0].explanation.is_some());
        assert!(resp.timing.is_none());
    }

    #[test]
    fn untranslatable_line_is_skipped() {
        let engine = Engine::fixture();
        let r = request(InputMode::RawText, &["Type 2 diabetes", "In the opinion of investigators"], &["pregnant"]);
        let resp = engine.generate(&r).unwrap();
        let status: Vec<_> = resp.lines.iter().map(|l| l.status).collect();
        assert_eq!(status, [LineStatus::Executed, LineStatus::Skipped, LineStatus::Executed]);
        assert_eq!(resp.lines[1].reason.as_ref().unwrap().kind, SkipKind::NotTranslatable);
        assert_eq!(resp.lines[2].line_number, 3);
        assert_eq!(resp.lines[2].polarity, Polarity::Exclusion);
    }

    #[test]
    fn request_errors() {
        let engine = Engine::fixture();
        let mut r = request(InputMode::LogicalForm, &["cond(\"x\""], &[]);
        assert!(matches!(engine.generate(&r), Err(PipelineError::MalformedLogicalForm { line: 1, .. })));
        r.smm_name = "nope".into();
        assert_eq!(engine.generate(&r).unwrap_err().code(), "UnknownSmm");
        let r = request(InputMode::RawText, &[], &[]);
        assert_eq!(engine.generate(&r), Err(PipelineError::EmptyRequest));
    }

    #[test]
    fn identical_requests_identical_responses() {
        let engine = Engine::fixture();
        let r = request(InputMode::RawText, &["women over age 50 with asthma"], &["metformin"]);
        let a = serde_json::to_string(&engine.generate(&r).unwrap()).unwrap();
        let b = serde_json::to_string(&engine.generate(&r).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
