//! Inside-to-outside resolution of logical forms into concept sets, numeric
//! filters and temporal constraints.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{ConceptSet, KnowledgeBase, Template};
use crate::llf::{serialize, LfArg, LfNode};
use crate::normalize::Normalizer;

pub const ENTITY_FUNCTIONS: [&str; 6] = ["cond", "obs", "proc", "drug", "lab", "allergy"];

pub fn is_entity(function: &str) -> bool {
    ENTITY_FUNCTIONS.contains(&function)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonError {
    #[error("invalid path `{path}`: {message}")]
    InvalidPath { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Resolved,
    NonComputable,
    Structural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "GT")]
    Gt,
    #[serde(rename = "GTEQ")]
    GtEq,
    #[serde(rename = "LT")]
    Lt,
    #[serde(rename = "LTEQ")]
    LtEq,
    #[serde(rename = "EQ")]
    Eq,
    #[serde(rename = "NEQ")]
    NotEq,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Gt, CmpOp::GtEq, CmpOp::Lt, CmpOp::LtEq, CmpOp::Eq, CmpOp::NotEq];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Gt => ">",
            CmpOp::GtEq => ">=",
            CmpOp::Lt => "<",
            CmpOp::LtEq => "<=",
            CmpOp::Eq => "=",
            CmpOp::NotEq => "<>",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Gt => "GT",
            CmpOp::GtEq => "GTEQ",
            CmpOp::Lt => "LT",
            CmpOp::LtEq => "LTEQ",
            CmpOp::Eq => "EQ",
            CmpOp::NotEq => "NEQ",
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Gt => lhs > rhs,
            CmpOp::GtEq => lhs >= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::LtEq => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::NotEq => lhs != rhs,
        }
    }
}

impl FromStr for CmpOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CmpOp::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| format!("unknown operator `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericFilter {
    pub op: CmpOp,
    pub value: f64,
    /// The value as written, for display.
    pub raw: String,
}

impl fmt::Display for NumericFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.op.symbol(), self.raw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalRelation {
    Before,
    After,
    Within,
    /// `X.caused_by(Y)` on a named X: X is recorded no earlier than Y.
    CausedBy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub value: f64,
    pub raw: String,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalConstraint {
    pub relation: TemporalRelation,
    pub anchor: ReasonedNode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

/// A logical-form node after reasoning.
///
/// `children` are set operands (intersect/union/not); `inputs` are nodes
/// whose concepts fed a knowledge-base rule; `temporal` anchors and the
/// `consequent` of `if_then` are constraints on this node's records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasonedNode {
    pub function: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub source: LfNode,
    pub concepts: ConceptSet,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ReasonedNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<ReasonedNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filters: Vec<NumericFilter>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub temporal: Vec<TemporalConstraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consequent: Option<Box<ReasonedNode>>,
    /// A failure of this node itself, independent of its concepts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<String>,
}

impl ReasonedNode {
    fn blank(source: &LfNode) -> Self {
        ReasonedNode {
            function: source.function.clone(),
            text: source.quoted().map(String::from),
            source: source.clone(),
            concepts: ConceptSet::new(),
            status: Status::Resolved,
            skip_reason: None,
            children: Vec::new(),
            inputs: Vec::new(),
            filters: Vec::new(),
            temporal: Vec::new(),
            consequent: None,
            defect: None,
        }
    }

    pub fn is_computable(&self) -> bool {
        self.status != Status::NonComputable
    }

    pub fn is_entity(&self) -> bool {
        is_entity(&self.function)
    }

    /// Recomputes `status` and `skip_reason` bottom-up.
    pub fn refresh(&mut self) {
        for c in self.children.iter_mut().chain(self.inputs.iter_mut()) {
            c.refresh();
        }
        for t in &mut self.temporal {
            t.anchor.refresh();
        }
        if let Some(c) = &mut self.consequent {
            c.refresh();
        }
        let failure = self.own_failure();
        self.status = match (&failure, self.function.as_str()) {
            (Some(_), _) => Status::NonComputable,
            (None, "intersect" | "union" | "not") => Status::Structural,
            (None, _) => Status::Resolved,
        };
        self.skip_reason = failure;
    }

    fn own_failure(&self) -> Option<String> {
        if let Some(d) = &self.defect {
            return Some(d.clone());
        }
        match self.function.as_str() {
            "intersect" | "not" => self
                .children
                .iter()
                .find(|c| !c.is_computable())
                .map(|c| format!("operand not computable: {}", c.skip_reason.as_deref().unwrap_or("?"))),
            "union" => (!self.children.is_empty() && self.children.iter().all(|c| !c.is_computable()))
                .then(|| "no computable alternative".to_string()),
            f => {
                if is_entity(f) && self.concepts.is_empty() {
                    return Some("no concepts".into());
                }
                if let Some(t) = self.temporal.iter().find(|t| !t.anchor.is_computable()) {
                    return Some(format!(
                        "temporal anchor not computable: {}",
                        t.anchor.skip_reason.as_deref().unwrap_or("?")
                    ));
                }
                match &self.consequent {
                    Some(c) if !c.is_computable() => Some("consequent not computable".into()),
                    _ => None,
                }
            }
        }
    }

    /// Resolves a `/`-separated path: `N` is `children[N]`, `iN` is
    /// `inputs[N]`, `tN` the anchor of `temporal[N]`, `c` the consequent.
    /// The empty path is this node.
    pub fn at_path_mut(&mut self, path: &str) -> Result<&mut ReasonedNode, ReasonError> {
        let bad = |message: &str| ReasonError::InvalidPath { path: path.to_string(), message: message.to_string() };
        let mut node = self;
        for seg in path.split('/').filter(|s| !s.is_empty()) {
            let index = |s: &str| s.parse::<usize>().map_err(|_| bad("malformed segment"));
            node = if let Some(rest) = seg.strip_prefix('t') {
                let i = index(rest)?;
                &mut node.temporal.get_mut(i).ok_or_else(|| bad("no such temporal constraint"))?.anchor
            } else if let Some(rest) = seg.strip_prefix('i') {
                let i = index(rest)?;
                node.inputs.get_mut(i).ok_or_else(|| bad("no such input"))?
            } else if seg == "c" {
                node.consequent.as_deref_mut().ok_or_else(|| bad("no consequent"))?
            } else {
                let i = index(seg)?;
                node.children.get_mut(i).ok_or_else(|| bad("no such child"))?
            };
        }
        Ok(node)
    }

    pub fn at_path(&self, path: &str) -> Result<&ReasonedNode, ReasonError> {
        let bad = |message: &str| ReasonError::InvalidPath { path: path.to_string(), message: message.to_string() };
        let mut node = self;
        for seg in path.split('/').filter(|s| !s.is_empty()) {
            let index = |s: &str| s.parse::<usize>().map_err(|_| bad("malformed segment"));
            node = if let Some(rest) = seg.strip_prefix('t') {
                &node.temporal.get(index(rest)?).ok_or_else(|| bad("no such temporal constraint"))?.anchor
            } else if let Some(rest) = seg.strip_prefix('i') {
                node.inputs.get(index(rest)?).ok_or_else(|| bad("no such input"))?
            } else if seg == "c" {
                node.consequent.as_deref().ok_or_else(|| bad("no consequent"))?
            } else {
                node.children.get(index(seg)?).ok_or_else(|| bad("no such child"))?
            };
        }
        Ok(node)
    }

    /// Paths of every entity node, in pre-order.
    pub fn entity_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk_paths(String::new(), &mut |path, n| {
            if n.is_entity() {
                out.push(path.to_string());
            }
        });
        out
    }

    fn walk_paths(&self, path: String, f: &mut impl FnMut(&str, &ReasonedNode)) {
        f(&path, self);
        let join = |seg: String| if path.is_empty() { seg } else { format!("{path}/{seg}") };
        for (i, c) in self.children.iter().enumerate() {
            c.walk_paths(join(i.to_string()), f);
        }
        for (i, c) in self.inputs.iter().enumerate() {
            c.walk_paths(join(format!("i{i}")), f);
        }
        for (i, t) in self.temporal.iter().enumerate() {
            t.anchor.walk_paths(join(format!("t{i}")), f);
        }
        if let Some(c) = &self.consequent {
            c.walk_paths(join("c".into()), f);
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let v: f64 = s.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

fn numeric_filters(pred: &LfNode) -> Result<Vec<NumericFilter>, String> {
    let mut out = Vec::new();
    for eq in pred.node_args() {
        let mut it = eq.node_args();
        let (Some(op), Some(val)) = (it.next(), it.next()) else {
            return Err("malformed comparison".into());
        };
        let op: CmpOp = op.args.first().and_then(LfArg::as_symbol).ok_or("missing operator")?.parse()?;
        let raw = val.quoted().ok_or("missing value")?.trim().to_string();
        let value = parse_number(&raw).ok_or_else(|| format!("non-numeric value `{raw}`"))?;
        out.push(NumericFilter { op, value, raw });
    }
    Ok(out)
}

/// Which template an entity applies to the concepts of a nested entity
/// argument, e.g. `drug(cond(...))` is the drugs treating those conditions.
pub fn nested_rule(outer: &str, inner: &str) -> Option<Template> {
    Some(match (outer, inner) {
        ("drug", "cond") => Template::DrugsTreating,
        ("cond", "obs") => Template::ConditionsAffecting,
        ("obs", "cond") => Template::SymptomsOf,
        ("cond", "drug") => Template::ContraindicationsForDrugs,
        _ => return None,
    })
}

pub struct Reasoner<'a> {
    kb: &'a KnowledgeBase,
    normalizer: &'a Normalizer,
}

impl<'a> Reasoner<'a> {
    pub fn new(kb: &'a KnowledgeBase, normalizer: &'a Normalizer) -> Self {
        Reasoner { kb, normalizer }
    }

    pub fn reason(&self, root: &LfNode) -> ReasonedNode {
        self.reason_traced(root).0
    }

    /// Like [`Reasoner::reason`], also returning the order in which nodes
    /// finished resolving (each entry is the compact source of the node).
    pub fn reason_traced(&self, root: &LfNode) -> (ReasonedNode, Vec<String>) {
        let mut trace = Vec::new();
        let mut r = self.node(root, &mut trace);
        r.refresh();
        (r, trace)
    }

    fn node(&self, n: &LfNode, trace: &mut Vec<String>) -> ReasonedNode {
        let mut r = ReasonedNode::blank(n);
        match n.function.as_str() {
            "intersect" | "union" | "not" => {
                r.children = n.node_args().map(|c| self.node(c, trace)).collect();
                if n.function == "not" && r.children.len() != 1 {
                    r.defect = Some("not takes one operand".into());
                }
            }
            "female" | "male" => {}
            "age" => {}
            f if is_entity(f) => self.entity(n, &mut r, trace),
            other => r.defect = Some(format!("`{other}` is not a criterion")),
        }
        if !is_entity(&n.function) {
            self.predicates(n, &mut r, trace, true);
        }
        r.refresh();
        trace.push(serialize(n, false));
        r
    }

    /// Numeric, temporal and `if_then` predicates common to every chainable
    /// node. Reasoning predicates are handled by [`Reasoner::entity`].
    fn predicates(&self, n: &LfNode, r: &mut ReasonedNode, trace: &mut Vec<String>, temporal_cause: bool) {
        for p in &n.predicates {
            let arg = p.node_args().next();
            match p.function.as_str() {
                "num_filter" => match numeric_filters(p) {
                    Ok(fs) => r.filters.extend(fs),
                    Err(e) => r.defect = Some(e),
                },
                "before" | "after" | "within" => {
                    let Some(a) = arg else {
                        r.defect = Some(format!("{} without an anchor", p.function));
                        continue;
                    };
                    let relation = match p.function.as_str() {
                        "before" => TemporalRelation::Before,
                        "after" => TemporalRelation::After,
                        _ => TemporalRelation::Within,
                    };
                    let mut window = None;
                    if relation == TemporalRelation::Within {
                        let val = p.args.get(1).and_then(LfArg::as_node).and_then(LfNode::quoted);
                        let unit = p.args.get(2).and_then(LfArg::as_node).and_then(LfNode::quoted);
                        match (val.map(|v| (v, parse_number(v))), unit) {
                            (Some((raw, Some(value))), Some(unit)) => {
                                window =
                                    Some(Window { value, raw: raw.trim().into(), unit: unit.trim().to_lowercase() })
                            }
                            _ => r.defect = Some("within needs a numeric value and a unit".into()),
                        }
                    }
                    let anchor = self.node(a, trace);
                    r.temporal.push(TemporalConstraint { relation, anchor, window });
                }
                "caused_by" if temporal_cause => {
                    if let Some(a) = arg {
                        let anchor = self.node(a, trace);
                        r.temporal.push(TemporalConstraint {
                            relation: TemporalRelation::CausedBy,
                            anchor,
                            window: None,
                        });
                    }
                }
                "if_then" => {
                    if let Some(a) = arg {
                        r.consequent = Some(Box::new(self.node(a, trace)));
                    }
                }
                "caused_by" | "contraindication" => {}
                other => r.defect = Some(format!("unsupported predicate `{other}`")),
            }
        }
    }

    fn known(&self, set: &ConceptSet) -> ConceptSet {
        ConceptSet {
            members: set.members.iter().filter(|c| self.kb.concept(c).is_some()).cloned().collect(),
            provenance: set.provenance.iter().filter(|p| self.kb.concept(&p.cui).is_some()).cloned().collect(),
        }
    }

    fn apply(&self, template: Template, input: &ReasonedNode) -> Result<ConceptSet, String> {
        if !input.is_computable() {
            return Err(format!("input not computable: {}", input.skip_reason.as_deref().unwrap_or("?")));
        }
        self.kb.query(template, crate::kb::Bindings::Concepts(&self.known(&input.concepts))).map_err(|e| e.to_string())
    }

    fn entity(&self, n: &LfNode, r: &mut ReasonedNode, trace: &mut Vec<String>) {
        let f = n.function.as_str();
        // caused_by derives symptoms for an unnamed entity and orders records otherwise
        let temporal_cause = r.text.is_some() || n.node_args().next().is_some();
        let mut derived: Option<ConceptSet> = None;
        if let Some(inner) = n.node_args().next() {
            let input = self.node(inner, trace);
            match nested_rule(f, &inner.function) {
                Some(t) => match self.apply(t, &input) {
                    Ok(s) => derived = Some(s),
                    Err(e) => r.defect = Some(e),
                },
                None => r.defect = Some(format!("no reasoning rule for {f}({}(...))", inner.function)),
            }
            r.inputs.push(input);
        }

        // reasoning predicates on this entity
        for p in &n.predicates {
            let template = match p.function.as_str() {
                "contraindication" => Template::ContraindicationsForDrugs,
                "caused_by" if !temporal_cause => Template::SymptomsOf,
                _ => continue,
            };
            let Some(a) = p.node_args().next() else { continue };
            let input = self.node(a, trace);
            match self.apply(template, &input) {
                Ok(s) => {
                    derived = Some(match derived {
                        Some(d) => intersect_sets(&d, &s),
                        None => s,
                    })
                }
                Err(e) => r.defect = Some(e),
            }
            r.inputs.push(input);
        }

        if let Some(text) = r.text.clone() {
            let named = self.named(f, &text);
            if named.is_empty() && r.defect.is_none() {
                r.defect = Some(format!("normalization failure: `{text}`"));
            }
            r.concepts = match derived {
                Some(d) => intersect_sets(&named, &d),
                None => named,
            };
        } else if let Some(d) = derived {
            r.concepts = d;
        } else if r.defect.is_none() {
            r.defect = Some("unnamed entity without a reasoning rule".into());
        }
        self.predicates(n, r, trace, temporal_cause);
    }

    /// Normalization hits for a named span, each expanded with its
    /// descendants.
    fn named(&self, function: &str, text: &str) -> ConceptSet {
        let hits: Vec<String> = if function == "lab" {
            self.normalizer.normalize_lab(text).map(|c| vec![c.cui]).unwrap_or_default()
        } else {
            self.normalizer.normalize_for(function, text).into_iter().map(|c| c.cui).collect()
        };
        let mut out = ConceptSet::new();
        for cui in hits {
            let expanded = self.kb.descendants(&cui).unwrap_or_else(|_| ConceptSet::seeded([cui]));
            out = out.union(&expanded);
        }
        out
    }
}

fn intersect_sets(a: &ConceptSet, b: &ConceptSet) -> ConceptSet {
    ConceptSet {
        members: a.members.intersection(&b.members).cloned().collect(),
        provenance: b.provenance.iter().filter(|p| a.members.contains(&p.cui)).cloned().collect(),
    }
}

/// Returns a copy of `root` with the entity at `path` given `concepts`
/// (expanded with descendants when `expand`). Ancestor statuses are
/// recomputed; the original is untouched.
pub fn apply_override(
    root: &ReasonedNode,
    path: &str,
    concepts: &ConceptSet,
    expand: bool,
    kb: &KnowledgeBase,
) -> Result<ReasonedNode, ReasonError> {
    let mut out = root.clone();
    let target = out.at_path_mut(path)?;
    if !target.is_entity() {
        return Err(ReasonError::InvalidPath {
            path: path.to_string(),
            message: format!("`{}` is not an entity", target.function),
        });
    }
    let mut set = ConceptSet::new();
    for p in &concepts.provenance {
        let one = ConceptSet { members: [p.cui.clone()].into(), provenance: vec![p.clone()] };
        set = set.union(&one);
        if expand {
            if let Ok(d) = kb.descendants(&p.cui) {
                set = set.union(&d);
            }
        }
    }
    target.concepts = set;
    target.defect = None;
    out.refresh();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptLine {
    pub cui: String,
    pub name: String,
    pub codes: Vec<String>,
    pub rule: String,
    /// Each step of the primary derivation, rendered with concept names.
    pub path: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub path: String,
    pub label: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub concepts: Vec<ConceptLine>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filters: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Explanation>,
}

impl Explanation {
    /// Indented plain-text rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        out.push_str(&format!("{pad}{} [{:?}]", self.label, self.status));
        if let Some(n) = &self.note {
            out.push_str(&format!(" {n}"));
        }
        out.push('\n');
        for f in &self.filters {
            out.push_str(&format!("{pad}  filter {f}\n"));
        }
        for c in &self.concepts {
            out.push_str(&format!("{pad}  {} {} {}\n", c.cui, c.name, c.codes.join(" ")));
            for step in &c.path {
                out.push_str(&format!("{pad}    via {step}\n"));
            }
        }
        for c in &self.children {
            c.render_into(depth + 1, out);
        }
    }

    pub fn find(&self, path: &str) -> Option<&Explanation> {
        if self.path == path {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(path))
    }
}

fn concept_name(kb: &KnowledgeBase, cui: &str) -> String {
    kb.concept(cui).map(|c| c.preferred_name.clone()).unwrap_or_else(|| cui.to_string())
}

/// Builds the explanation tree of a reasoned node.
pub fn explain(node: &ReasonedNode, kb: &KnowledgeBase) -> Explanation {
    explain_at(node, kb, String::new())
}

fn explain_at(node: &ReasonedNode, kb: &KnowledgeBase, path: String) -> Explanation {
    let label = match &node.text {
        Some(t) => format!("{}(\"{}\")", node.function, t),
        None => format!("{}()", node.function),
    };
    let note = match node.status {
        Status::NonComputable => {
            let reason = node.skip_reason.as_deref().unwrap_or("not computable");
            Some(format!("skipped: {reason}"))
        }
        _ => None,
    };
    let concepts = node
        .concepts
        .members
        .iter()
        .map(|cui| {
            let prov = node.concepts.provenance_of(cui);
            ConceptLine {
                cui: cui.clone(),
                name: concept_name(kb, cui),
                codes: kb.concept(cui).map(|c| c.codes.iter().map(|c| c.to_string()).collect()).unwrap_or_default(),
                rule: prov.map(|p| p.rule.clone()).unwrap_or_default(),
                path: prov
                    .map(|p| {
                        p.path
                            .iter()
                            .map(|t| {
                                format!(
                                    "{} {} {}",
                                    concept_name(kb, &t.subject),
                                    t.predicate,
                                    concept_name(kb, &t.object)
                                )
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
            }
        })
        .collect();
    let mut filters: Vec<String> = node.filters.iter().map(|f| format!("value {f}")).collect();
    let join = |seg: String| if path.is_empty() { seg } else { format!("{path}/{seg}") };
    let mut children: Vec<Explanation> =
        node.children.iter().enumerate().map(|(i, c)| explain_at(c, kb, join(i.to_string()))).collect();
    children.extend(node.inputs.iter().enumerate().map(|(i, c)| explain_at(c, kb, join(format!("i{i}")))));
    for (i, t) in node.temporal.iter().enumerate() {
        let window = t.window.as_ref().map(|w| format!(" {} {}", w.raw, w.unit)).unwrap_or_default();
        filters.push(format!("{:?}{window} of {}", t.relation, t.anchor.source_text()).to_lowercase());
        children.push(explain_at(&t.anchor, kb, join(format!("t{i}"))));
    }
    if let Some(c) = &node.consequent {
        children.push(explain_at(c, kb, join("c".into())));
    }
    Explanation { path, label, status: node.status, note, concepts, filters, children }
}

impl ReasonedNode {
    /// Compact logical form of this node.
    pub fn source_text(&self) -> String {
        serialize(&self.source, false)
    }
}
