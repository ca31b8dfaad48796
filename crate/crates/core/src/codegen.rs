//! Maps reasoned criteria onto a semantic metadata mapping and emits one SQL
//! statement per criteria line.
//!
//! The emitted dialect is a small ANSI subset: `SELECT DISTINCT`, `WHERE`,
//! `EXISTS`, `UNION`/`INTERSECT`/`EXCEPT`, `DATE '...'` and
//! `TIMESTAMP '...'` literals, and `col + INTERVAL 'n' UNIT` for windows.

use std::collections::BTreeSet;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{Code, KnowledgeBase};
use crate::llf::{serialize, Criterion, Polarity};
use crate::reason::{CmpOp, NumericFilter, ReasonedNode, TemporalConstraint, TemporalRelation, Window};
use crate::smm::{ColumnRole, SemanticMetadataMapping, Strategy, TableMapping};

/// Largest age magnitude rendered; beyond it every comparison is decided.
pub const AGE_LIMIT: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("no mapping target: {0}")]
    NoMappingTarget(String),
    #[error("unsupported filter: {0}")]
    UnsupportedFilter(String),
    #[error("not computable: {0}")]
    NonComputable(String),
}

impl CodegenError {
    pub fn skip_kind(&self) -> SkipKind {
        match self {
            CodegenError::NoMappingTarget(_) => SkipKind::NoMappingTarget,
            CodegenError::UnsupportedFilter(_) => SkipKind::UnsupportedFilter,
            CodegenError::NonComputable(_) => SkipKind::NonComputable,
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            CodegenError::NoMappingTarget(s) | CodegenError::UnsupportedFilter(s) | CodegenError::NonComputable(s) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Replaces "now": ages are computed at this date and every record
    /// dated after it is ignored.
    pub pin_date: Option<NaiveDate>,
}

impl CompileOptions {
    pub fn pinned(date: NaiveDate) -> Self {
        CompileOptions { pin_date: Some(date) }
    }

    /// The date ages are computed against.
    pub fn reference_date(&self) -> NaiveDate {
        self.pin_date.unwrap_or_else(|| chrono::Local::now().date_naive())
    }
}

/// A table, or a column of a pivoted table, that holds records of a node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingTarget {
    pub table: String,
    pub strategy: Strategy,
    /// The pivoted column, for pivoted tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<ColumnRole>,
    /// Codes to filter on, for tall tables.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub codes: BTreeSet<Code>,
    /// Node concepts that reach this target.
    pub concepts: BTreeSet<String>,
}

/// Tables and columns whose tags cover the node's concepts.
///
/// A tall table matches a concept subsumed by one of its tags and filters on
/// the concept's codes in the table's code systems; concepts with a
/// dedicated pivoted column elsewhere in the mapping are left to that
/// column. A pivoted column matches when one of its tags is a node concept.
pub fn map_criterion(node: &ReasonedNode, smm: &SemanticMetadataMapping, kb: &KnowledgeBase) -> Vec<MappingTarget> {
    let pivoted = smm.pivoted_concepts();
    let mut out = Vec::new();
    for t in &smm.tables {
        match t.strategy {
            Strategy::Pivoted => {
                for c in &t.columns {
                    let hits: BTreeSet<String> = c.tag_concepts.intersection(&node.concepts.members).cloned().collect();
                    if !hits.is_empty() {
                        out.push(MappingTarget {
                            table: t.table_name.clone(),
                            strategy: Strategy::Pivoted,
                            column: Some(c.column_name.clone()),
                            role: Some(c.role),
                            codes: BTreeSet::new(),
                            concepts: hits,
                        });
                    }
                }
            }
            Strategy::Tall => {
                let systems = t.code_column.as_ref().map(|c| c.code_systems()).unwrap_or_default();
                let mut codes = BTreeSet::new();
                let mut concepts = BTreeSet::new();
                for cui in &node.concepts.members {
                    if pivoted.contains(cui.as_str()) || !t.tag_concepts.iter().any(|tag| kb.is_a(cui, tag)) {
                        continue;
                    }
                    let Some(concept) = kb.concept(cui) else { continue };
                    let before = codes.len();
                    codes.extend(concept.codes.iter().filter(|c| systems.contains(&c.system)).cloned());
                    if codes.len() > before || concept.codes.iter().any(|c| systems.contains(&c.system)) {
                        concepts.insert(cui.clone());
                    }
                }
                if !codes.is_empty() {
                    out.push(MappingTarget {
                        table: t.table_name.clone(),
                        strategy: Strategy::Tall,
                        column: None,
                        role: None,
                        codes,
                        concepts,
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledLine {
    pub sql: String,
    pub concepts_used: Vec<String>,
}

pub fn compile_line(
    node: &ReasonedNode,
    smm: &SemanticMetadataMapping,
    kb: &KnowledgeBase,
    options: &CompileOptions,
) -> Result<CompiledLine, CodegenError> {
    let mut cx = Context { smm, kb, options, used: BTreeSet::new() };
    let query = cx.node(node)?;
    let mut counter = 0;
    Ok(CompiledLine { sql: query.render(&mut counter), concepts_used: cx.used.into_iter().collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineStatus {
    Executed,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkipKind {
    NonComputable,
    NoMappingTarget,
    UnsupportedFilter,
    NotTranslatable,
    MalformedLogicalForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipReason {
    pub kind: SkipKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanLine {
    pub line_number: usize,
    pub polarity: Polarity,
    pub status: LineStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<SkipReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sql: Option<String>,
    #[serde(default)]
    pub concepts_used: Vec<String>,
}

impl PlanLine {
    pub fn skipped(line_number: usize, polarity: Polarity, kind: SkipKind, detail: impl Into<String>) -> Self {
        PlanLine {
            line_number,
            polarity,
            status: LineStatus::Skipped,
            reason: Some(SkipReason { kind, detail: detail.into() }),
            sql: None,
            concepts_used: Vec::new(),
        }
    }
}

/// Per-line SQL. The cohort after line k is the intersection of the
/// executed inclusion cohorts up to k minus the union of the executed
/// exclusion cohorts up to k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPlan {
    pub smm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin_date: Option<NaiveDate>,
    pub lines: Vec<PlanLine>,
}

/// Compiles each criterion; `reasoned[i]` is `None` when criterion `i` has no
/// logical form.
pub fn compile_trial(
    criteria: &[Criterion],
    reasoned: &[Option<ReasonedNode>],
    smm: &SemanticMetadataMapping,
    kb: &KnowledgeBase,
    options: &CompileOptions,
) -> QueryPlan {
    assert_eq!(criteria.len(), reasoned.len(), "one reasoned node per criterion");
    let lines = criteria
        .iter()
        .zip(reasoned)
        .map(|(c, r)| match r {
            None => PlanLine::skipped(c.line_number, c.polarity, SkipKind::NotTranslatable, "no logical form"),
            Some(node) => match compile_line(node, smm, kb, options) {
                Ok(line) => PlanLine {
                    line_number: c.line_number,
                    polarity: c.polarity,
                    status: LineStatus::Executed,
                    reason: None,
                    sql: Some(line.sql),
                    concepts_used: line.concepts_used,
                },
                Err(e) => PlanLine::skipped(c.line_number, c.polarity, e.skip_kind(), e.detail()),
            },
        })
        .collect();
    QueryPlan { smm: smm.name.clone(), pin_date: options.pin_date, lines }
}

// ---- query representation -------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SetOp {
    Union,
    Intersect,
    Except,
}

impl SetOp {
    fn keyword(self) -> &'static str {
        match self {
            SetOp::Union => "UNION",
            SetOp::Intersect => "INTERSECT",
            SetOp::Except => "EXCEPT",
        }
    }
}

#[derive(Debug, Clone)]
struct Select {
    table: String,
    alias: Option<String>,
    person_id_column: String,
    conditions: Vec<String>,
}

impl Select {
    fn render(&self) -> String {
        let pid = qualify(self.alias.as_deref(), &self.person_id_column);
        let mut s = format!("SELECT DISTINCT {pid}");
        if self.person_id_column != "person_id" {
            s.push_str(" AS person_id");
        }
        s.push_str(" FROM ");
        s.push_str(&self.table);
        if let Some(a) = &self.alias {
            s.push_str(" AS ");
            s.push_str(a);
        }
        if !self.conditions.is_empty() {
            s.push_str(" WHERE ");
            s.push_str(&self.conditions.join(" AND "));
        }
        s
    }
}

#[derive(Debug, Clone)]
enum Query {
    Select(Select),
    Compound(SetOp, Vec<Query>),
}

impl Query {
    fn compound(op: SetOp, mut items: Vec<Query>) -> Query {
        if items.len() == 1 && op != SetOp::Except {
            return items.pop().unwrap();
        }
        Query::Compound(op, items)
    }

    fn render(&self, counter: &mut usize) -> String {
        match self {
            Query::Select(s) => s.render(),
            Query::Compound(op, items) => {
                let mut operands = Vec::new();
                for item in items {
                    flatten(*op, item, &mut operands);
                }
                operands
                    .into_iter()
                    .map(|q| match q {
                        Query::Select(s) => s.render(),
                        nested => {
                            let inner = nested.render(counter);
                            *counter += 1;
                            format!("SELECT person_id FROM ({inner}) AS u{counter}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(&format!(" {} ", op.keyword()))
            }
        }
    }
}

fn flatten<'q>(op: SetOp, q: &'q Query, out: &mut Vec<&'q Query>) {
    match q {
        Query::Compound(inner, items) if *inner == op && op != SetOp::Except => {
            for i in items {
                flatten(op, i, out);
            }
        }
        _ => out.push(q),
    }
}

fn qualify(alias: Option<&str>, column: &str) -> String {
    match alias {
        Some(a) => format!("{a}.{column}"),
        None => column.to_string(),
    }
}

pub fn sql_string(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn sql_number(v: f64) -> String {
    format!("{v}")
}

fn date_literal(d: NaiveDate) -> String {
    format!("DATE '{}'", d.format("%Y-%m-%d"))
}

fn end_of_day(d: NaiveDate) -> String {
    format!("TIMESTAMP '{} 23:59:59'", d.format("%Y-%m-%d"))
}

fn in_list<'a>(column: &str, values: impl IntoIterator<Item = &'a str>) -> String {
    let values: Vec<String> = values.into_iter().map(sql_string).collect();
    if values.len() == 1 {
        format!("{column} = {}", values[0])
    } else {
        format!("{column} IN ({})", values.join(", "))
    }
}

/// The date `years` years before `d`; Feb 29 falls back to Feb 28.
pub fn years_before(d: NaiveDate, years: i64) -> NaiveDate {
    let y = d.year() - years as i32;
    NaiveDate::from_ymd_opt(y, d.month(), d.day())
        .or_else(|| NaiveDate::from_ymd_opt(y, d.month(), d.day() - 1))
        .expect("valid date")
}

/// Integer age at `on` of someone born on `birth`.
pub fn age_at(birth: NaiveDate, on: NaiveDate) -> i64 {
    let mut age = (on.year() - birth.year()) as i64;
    if (on.month(), on.day()) < (birth.month(), birth.day()) {
        age -= 1;
    }
    age
}

/// Interval arithmetic for a window: `(amount, SQL unit)`.
pub fn window_interval(w: &Window) -> Result<(i64, &'static str), CodegenError> {
    let unsupported = || CodegenError::UnsupportedFilter(format!("window of {} {}", w.raw, w.unit));
    let u = w.unit.trim().to_lowercase();
    let (scale, unit, minutes) = match u.as_str() {
        "minute" | "minutes" | "min" | "mins" => (1.0, "MINUTE", 1.0),
        "hour" | "hours" | "hr" | "hrs" => (1.0, "HOUR", 60.0),
        "day" | "days" => (1.0, "DAY", 1440.0),
        "week" | "weeks" | "wk" | "wks" => (7.0, "DAY", 10080.0),
        _ => return Err(unsupported()),
    };
    if w.value.is_nan() || w.value < 0.0 || w.value > 1e9 {
        return Err(unsupported());
    }
    let n = w.value * scale;
    if n.fract() == 0.0 {
        return Ok((n as i64, unit));
    }
    let m = w.value * minutes;
    if m.fract() == 0.0 {
        return Ok((m as i64, "MINUTE"));
    }
    Err(unsupported())
}

// ---- compilation ------------------------------------------------------------

struct Context<'a> {
    smm: &'a SemanticMetadataMapping,
    kb: &'a KnowledgeBase,
    options: &'a CompileOptions,
    used: BTreeSet<String>,
}

fn describe(node: &ReasonedNode) -> String {
    node.text.clone().unwrap_or_else(|| serialize(&node.source, false))
}

impl Context<'_> {
    fn node(&mut self, n: &ReasonedNode) -> Result<Query, CodegenError> {
        if !n.is_computable() {
            return Err(CodegenError::NonComputable(n.skip_reason.clone().unwrap_or_default()));
        }
        let base = match n.function.as_str() {
            "intersect" => {
                if n.children.is_empty() {
                    return Err(CodegenError::UnsupportedFilter("intersect without operands".into()));
                }
                let items = n.children.iter().map(|c| self.node(c)).collect::<Result<Vec<_>, _>>()?;
                Query::compound(SetOp::Intersect, items)
            }
            "union" => {
                let mut items = Vec::new();
                let mut first_err = None;
                for c in &n.children {
                    match self.node(c) {
                        Ok(q) => items.push(q),
                        Err(e @ CodegenError::UnsupportedFilter(_)) => return Err(e),
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
                if items.is_empty() {
                    return Err(first_err.unwrap_or_else(|| CodegenError::NoMappingTarget("empty union".into())));
                }
                Query::compound(SetOp::Union, items)
            }
            "not" => {
                let inner = self.node(&n.children[0])?;
                Query::Compound(SetOp::Except, vec![self.universe()?, inner])
            }
            "female" | "male" => {
                let d = self.demographics()?;
                let value = if n.function == "female" { &d.female_value } else { &d.male_value };
                let mut s = self.demographic_select()?;
                s.conditions.insert(0, format!("{} = {}", d.gender_column, sql_string(value)));
                Query::Select(s)
            }
            "age" => Query::Select(self.age(n)?),
            f if crate::reason::is_entity(f) => self.entity(n)?,
            other => return Err(CodegenError::UnsupportedFilter(format!("`{other}` has no SQL form"))),
        };
        if !n.is_entity() {
            if n.function != "age" && !n.filters.is_empty() {
                return Err(CodegenError::UnsupportedFilter(format!("numeric filter on {}", n.function)));
            }
            if !n.temporal.is_empty() {
                return Err(CodegenError::UnsupportedFilter(format!("temporal constraint on {}", n.function)));
            }
        }
        match &n.consequent {
            None => Ok(base),
            Some(y) => {
                let then = self.node(y)?;
                let not_x = Query::Compound(SetOp::Except, vec![self.universe()?, base.clone()]);
                Ok(Query::compound(SetOp::Union, vec![not_x, Query::compound(SetOp::Intersect, vec![base, then])]))
            }
        }
    }

    fn demographics(&self) -> Result<&crate::smm::Demographics, CodegenError> {
        self.smm
            .demographics
            .as_ref()
            .ok_or_else(|| CodegenError::NoMappingTarget(format!("`{}` maps no demographics table", self.smm.name)))
    }

    fn demographic_select(&self) -> Result<Select, CodegenError> {
        let d = self.demographics()?;
        let mut conditions = Vec::new();
        if let Some(pin) = self.options.pin_date {
            conditions.push(format!("{} <= {}", d.birth_date_column, date_literal(pin)));
        }
        Ok(Select { table: d.table.clone(), alias: None, person_id_column: d.person_id_column.clone(), conditions })
    }

    fn universe(&self) -> Result<Query, CodegenError> {
        Ok(Query::Select(self.demographic_select()?))
    }

    fn age(&self, n: &ReasonedNode) -> Result<Select, CodegenError> {
        let d = self.demographics()?;
        let on = self.options.reference_date();
        let b = &d.birth_date_column;
        let t = |age: f64| date_literal(years_before(on, age.clamp(-AGE_LIMIT, AGE_LIMIT) as i64));
        // age >= k  <=>  b <= T(k);  age <= k  <=>  b > T(k + 1)
        let at_least = |k: f64| format!("{b} <= {}", t(k));
        let at_most = |k: f64| format!("{b} > {}", t(k + 1.0));
        let mut conds = Vec::new();
        for f in &n.filters {
            let v = f.value;
            match f.op {
                CmpOp::Gt => conds.push(at_least(v.floor() + 1.0)),
                CmpOp::GtEq => conds.push(at_least(v.ceil())),
                CmpOp::Lt => conds.push(at_most(v.ceil() - 1.0)),
                CmpOp::LtEq => conds.push(at_most(v.floor())),
                CmpOp::Eq if v.fract() == 0.0 => {
                    conds.push(at_least(v));
                    conds.push(at_most(v));
                }
                CmpOp::Eq => conds.push("1 = 0".into()),
                CmpOp::NotEq if v.fract() == 0.0 => {
                    conds.push(format!("({} OR {})", at_most(v - 1.0), at_least(v + 1.0)));
                }
                CmpOp::NotEq => {}
            }
        }
        let mut s = self.demographic_select()?;
        conds.append(&mut s.conditions);
        s.conditions = conds;
        Ok(s)
    }

    fn entity(&mut self, n: &ReasonedNode) -> Result<Query, CodegenError> {
        let targets = map_criterion(n, self.smm, self.kb);
        if targets.is_empty() {
            return Err(CodegenError::NoMappingTarget(format!("no table holds `{}`", describe(n))));
        }
        let alias = (!n.temporal.is_empty()).then_some("e");
        let mut selects = Vec::new();
        let mut dropped = Vec::new();
        for target in &targets {
            let table = self.smm.table(&target.table).expect("target table exists");
            let Some(mut conditions) = self.record_conditions(alias, table, target, &n.filters) else {
                dropped.push(target.table.clone());
                continue;
            };
            if !n.temporal.is_empty() {
                let Some(date) = &table.date_column else {
                    dropped.push(target.table.clone());
                    continue;
                };
                let mut anchors = 0;
                for t in &n.temporal {
                    conditions.push(self.temporal(t, table, date, &mut anchors)?);
                }
            }
            self.used.extend(target.concepts.iter().cloned());
            selects.push(Query::Select(Select {
                table: table.table_name.clone(),
                alias: alias.map(String::from),
                person_id_column: table.person_id_column.clone(),
                conditions,
            }));
        }
        if selects.is_empty() {
            return Err(CodegenError::UnsupportedFilter(format!(
                "`{}`: no target supports the filters ({})",
                describe(n),
                dropped.join(", ")
            )));
        }
        Ok(Query::compound(SetOp::Union, selects))
    }

    /// Conditions selecting a target's records, or `None` when the target
    /// cannot carry the numeric filters.
    fn record_conditions(
        &self,
        alias: Option<&str>,
        table: &TableMapping,
        target: &MappingTarget,
        filters: &[NumericFilter],
    ) -> Option<Vec<String>> {
        let q = |c: &str| qualify(alias, c);
        let mut out = Vec::new();
        match table.strategy {
            Strategy::Tall => {
                let cc = table.code_column.as_ref().expect("validated tall table");
                match &cc.system_column {
                    None => out.push(in_list(&q(&cc.name), target.codes.iter().map(|c| c.code.as_str()))),
                    Some(sys) => {
                        let systems: BTreeSet<_> = target.codes.iter().map(|c| c.system).collect();
                        let groups: Vec<String> = systems
                            .iter()
                            .map(|s| {
                                let codes = target.codes.iter().filter(|c| c.system == *s).map(|c| c.code.as_str());
                                format!("{} = {} AND {}", q(sys), sql_string(s.as_str()), in_list(&q(&cc.name), codes))
                            })
                            .collect();
                        if groups.len() == 1 {
                            out.push(groups.into_iter().next().unwrap());
                        } else {
                            out.push(format!(
                                "({})",
                                groups.iter().map(|g| format!("({g})")).collect::<Vec<_>>().join(" OR ")
                            ));
                        }
                    }
                }
                if !filters.is_empty() {
                    let v = table.value_column.as_ref()?;
                    out.extend(filters.iter().map(|f| format!("{} {} {}", q(v), f.op.symbol(), sql_number(f.value))));
                }
            }
            Strategy::Pivoted => {
                let col = q(target.column.as_ref().expect("pivoted target has a column"));
                match target.role.expect("pivoted target has a role") {
                    ColumnRole::Flag => {
                        if !filters.is_empty() {
                            return None;
                        }
                        out.push(format!("{col} = 1"));
                    }
                    ColumnRole::Value if filters.is_empty() => out.push(format!("{col} IS NOT NULL")),
                    ColumnRole::Value => {
                        out.extend(filters.iter().map(|f| format!("{col} {} {}", f.op.symbol(), sql_number(f.value))))
                    }
                }
            }
        }
        if let (Some(pin), Some(date)) = (self.options.pin_date, &table.date_column) {
            out.push(format!("{} <= {}", q(date), end_of_day(pin)));
        }
        Some(out)
    }

    fn temporal(
        &mut self,
        t: &TemporalConstraint,
        outer: &TableMapping,
        outer_date: &str,
        anchors: &mut usize,
    ) -> Result<String, CodegenError> {
        let a = &t.anchor;
        if !a.is_entity() {
            return Err(CodegenError::UnsupportedFilter(format!("temporal anchor `{}` is not an entity", describe(a))));
        }
        if !a.temporal.is_empty() || a.consequent.is_some() {
            return Err(CodegenError::UnsupportedFilter(format!("nested constraint on anchor `{}`", describe(a))));
        }
        let interval = match (&t.relation, &t.window) {
            (TemporalRelation::Within, Some(w)) => Some(window_interval(w)?),
            (TemporalRelation::Within, None) => {
                return Err(CodegenError::UnsupportedFilter("within without a window".into()))
            }
            _ => None,
        };
        let targets = map_criterion(a, self.smm, self.kb);
        let x = format!("e.{outer_date}");
        let mut exists = Vec::new();
        for target in &targets {
            let table = self.smm.table(&target.table).expect("target table exists");
            let Some(date) = &table.date_column else { continue };
            *anchors += 1;
            let alias = format!("a{anchors}");
            let Some(mut conds) = self.record_conditions(Some(&alias), table, target, &a.filters) else {
                continue;
            };
            let y = format!("{alias}.{date}");
            let mut all = vec![format!("{alias}.{} = e.{}", table.person_id_column, outer.person_id_column)];
            all.append(&mut conds);
            match (t.relation, interval) {
                (TemporalRelation::Before, _) => all.push(format!("{x} < {y}")),
                (TemporalRelation::After, _) => all.push(format!("{x} > {y}")),
                (TemporalRelation::CausedBy, _) => all.push(format!("{x} >= {y}")),
                (TemporalRelation::Within, Some((n, unit))) => {
                    all.push(format!("{y} <= {x}"));
                    all.push(format!("{x} <= {y} + INTERVAL '{n}' {unit}"));
                }
                (TemporalRelation::Within, None) => unreachable!(),
            }
            self.used.extend(target.concepts.iter().cloned());
            exists.push(format!("EXISTS (SELECT 1 FROM {} AS {alias} WHERE {})", table.table_name, all.join(" AND ")));
        }
        match exists.len() {
            0 => Err(CodegenError::NoMappingTarget(format!("no dated table holds anchor `{}`", describe(a)))),
            1 => Ok(exists.pop().unwrap()),
            _ => Ok(format!("({})", exists.join(" OR "))),
        }
    }
}
