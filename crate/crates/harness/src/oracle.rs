//! Brute-force in-memory evaluation of reasoned logical forms over the
//! canonical records, independent of any SQL.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime};
use lfq_core::kb::{Code, KnowledgeBase};
use lfq_core::reason::{is_entity, NumericFilter, ReasonedNode, TemporalRelation, Window};

use crate::db::{Event, Person, SyntheticDb};

/// The set of persons satisfying `node`, or `None` when the node is not
/// computable or uses a construct with no defined cohort (a non-entity
/// anchor, a calendar-unit window, filters on a non-entity).
///
/// Ages are taken at `pin`, or today when unpinned; with a pin, records
/// after the end of that day and persons born after it are invisible.
pub fn oracle_eval(
    node: &ReasonedNode,
    db: &SyntheticDb,
    kb: &KnowledgeBase,
    pin: Option<NaiveDate>,
) -> Option<BTreeSet<i64>> {
    let on = pin.unwrap_or_else(|| chrono::Local::now().date_naive());
    let cutoff = pin.map(|d| d.and_time(NaiveTime::from_hms_opt(23, 59, 59).unwrap()));
    let persons: Vec<&Person> = db.persons.iter().filter(|p| pin.is_none_or(|d| p.birth_date <= d)).collect();
    let events: Vec<&Event> = db.events.iter().filter(|e| cutoff.is_none_or(|c| e.at <= c)).collect();
    let mut by_person: BTreeMap<i64, Vec<&Event>> = BTreeMap::new();
    for e in &events {
        by_person.entry(e.person_id).or_default().push(e);
    }
    let o = Oracle { kb, on, persons, events, by_person };
    o.eval(node)
}

struct Oracle<'a> {
    kb: &'a KnowledgeBase,
    on: NaiveDate,
    persons: Vec<&'a Person>,
    events: Vec<&'a Event>,
    by_person: BTreeMap<i64, Vec<&'a Event>>,
}

/// Whole years from `birth` to `on`.
pub fn age_on(birth: NaiveDate, on: NaiveDate) -> i64 {
    let mut years = (on.year() - birth.year()) as i64;
    if (on.month(), on.day()) < (birth.month(), birth.day()) {
        years -= 1;
    }
    years
}

/// A window length in minutes, when it is a whole number of minutes in a
/// fixed-length unit.
pub fn window_minutes(w: &Window) -> Option<i64> {
    let per = match w.unit.trim().to_lowercase().as_str() {
        "minute" | "minutes" | "min" | "mins" => 1.0,
        "hour" | "hours" | "hr" | "hrs" => 60.0,
        "day" | "days" => 1440.0,
        "week" | "weeks" | "wk" | "wks" => 10080.0,
        _ => return None,
    };
    if !(0.0..=1e9).contains(&w.value) {
        return None;
    }
    let m = w.value * per;
    (m.fract() == 0.0).then_some(m as i64)
}

impl Oracle<'_> {
    fn universe(&self) -> BTreeSet<i64> {
        self.persons.iter().map(|p| p.person_id).collect()
    }

    fn eval(&self, n: &ReasonedNode) -> Option<BTreeSet<i64>> {
        if !n.is_computable() {
            return None;
        }
        if !n.is_entity() && (!n.temporal.is_empty() || (n.function != "age" && !n.filters.is_empty())) {
            return None;
        }
        let base = match n.function.as_str() {
            "intersect" => {
                let mut it = n.children.iter();
                let mut acc = self.eval(it.next()?)?;
                for c in it {
                    let s = self.eval(c)?;
                    acc.retain(|p| s.contains(p));
                }
                acc
            }
            "union" => {
                let live: Vec<&ReasonedNode> = n.children.iter().filter(|c| c.is_computable()).collect();
                if live.is_empty() {
                    return None;
                }
                let mut acc = BTreeSet::new();
                for c in live {
                    acc.extend(self.eval(c)?);
                }
                acc
            }
            "not" => {
                let inner = self.eval(n.children.first()?)?;
                self.universe().difference(&inner).copied().collect()
            }
            "female" | "male" => {
                let female = n.function == "female";
                self.persons.iter().filter(|p| p.female == female).map(|p| p.person_id).collect()
            }
            "age" => self
                .persons
                .iter()
                .filter(|p| {
                    let a = age_on(p.birth_date, self.on) as f64;
                    n.filters.iter().all(|f| f.op.holds(a, f.value))
                })
                .map(|p| p.person_id)
                .collect(),
            f if is_entity(f) => self.entity(n)?,
            _ => return None,
        };
        match &n.consequent {
            None => Some(base),
            Some(y) => {
                let then = self.eval(y)?;
                let mut out: BTreeSet<i64> = self.universe().difference(&base).copied().collect();
                out.extend(base.intersection(&then));
                Some(out)
            }
        }
    }

    fn codes(&self, n: &ReasonedNode) -> BTreeSet<&Code> {
        n.concepts.members.iter().filter_map(|c| self.kb.concept(c)).flat_map(|c| c.codes.iter()).collect()
    }

    fn matches(e: &Event, codes: &BTreeSet<&Code>, filters: &[NumericFilter]) -> bool {
        codes.contains(&e.code)
            && (filters.is_empty() || e.value.is_some_and(|v| filters.iter().all(|f| f.op.holds(v, f.value))))
    }

    fn entity(&self, n: &ReasonedNode) -> Option<BTreeSet<i64>> {
        let codes = self.codes(n);
        struct Anchor<'a> {
            relation: TemporalRelation,
            codes: BTreeSet<&'a Code>,
            filters: &'a [NumericFilter],
            window: Option<i64>,
        }
        let mut anchors = Vec::new();
        for t in &n.temporal {
            let a = &t.anchor;
            if !a.is_entity() || !a.is_computable() || !a.temporal.is_empty() || a.consequent.is_some() {
                return None;
            }
            let window = match t.relation {
                TemporalRelation::Within => Some(window_minutes(t.window.as_ref()?)?),
                _ => None,
            };
            anchors.push(Anchor { relation: t.relation, codes: self.codes(a), filters: &a.filters, window });
        }
        let holds = |x: NaiveDateTime, y: NaiveDateTime, a: &Anchor| match a.relation {
            TemporalRelation::Before => x < y,
            TemporalRelation::After => x > y,
            TemporalRelation::CausedBy => x >= y,
            TemporalRelation::Within => y <= x && x <= y + Duration::minutes(a.window.unwrap_or(0)),
        };
        let mut out = BTreeSet::new();
        for e in &self.events {
            if out.contains(&e.person_id) || !Self::matches(e, &codes, &n.filters) {
                continue;
            }
            let own = self.by_person.get(&e.person_id).map(Vec::as_slice).unwrap_or(&[]);
            let ok = anchors
                .iter()
                .all(|a| own.iter().any(|y| Self::matches(y, &a.codes, a.filters) && holds(e.at, y.at, a)));
            if ok {
                out.insert(e.person_id);
            }
        }
        Some(out)
    }
}
