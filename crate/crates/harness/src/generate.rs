//! Seeded synthetic database generation with planted cohorts.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime};
use lfq_core::kb::{Code, KnowledgeBase};
use lfq_core::llf::parse;
use lfq_core::pipeline::Engine;
use lfq_core::reason::{is_entity, NumericFilter, ReasonedNode, TemporalRelation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::db::{code_pool, Domain, Event, Person, SyntheticDb};
use crate::oracle::{age_on, window_minutes};
use crate::HarnessError;

const MAX_AGE: i64 = 110;

/// A criterion in logical form and the persons who must satisfy it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plant {
    pub criterion: String,
    pub persons: Vec<i64>,
}

/// Plant instructions as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantFile {
    /// Ages and record cut-offs of planted persons are relative to this day.
    #[serde(default = "default_reference_date")]
    pub reference_date: NaiveDate,
    pub plants: Vec<Plant>,
}

fn default_reference_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2023, 1, 1).unwrap()
}

impl PlantFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(format!("plant file: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub patients: usize,
    pub reference_date: NaiveDate,
    pub plants: Vec<Plant>,
}

impl GenConfig {
    pub fn new(seed: u64, patients: usize) -> Self {
        GenConfig { seed, patients, reference_date: default_reference_date(), plants: Vec::new() }
    }

    pub fn with_plants(mut self, file: PlantFile) -> Self {
        self.reference_date = file.reference_date;
        self.plants = file.plants;
        self
    }
}

/// Builds a database of `patients` persons with ids `1..=patients`.
///
/// Background persons get random demographics and 0 to 12 coded events
/// between 2015 and 2022, some followed by a second event within ten hours.
/// Background events never use a code mentioned by a plant, so a planted
/// criterion holds for exactly its planted persons plus any persons planted
/// for other criteria that share its codes.
pub fn generate_db(cfg: &GenConfig, engine: &Engine) -> Result<SyntheticDb, HarnessError> {
    if cfg.patients == 0 {
        return Err(HarnessError::InfeasiblePlant("at least one patient is required".into()));
    }
    let kb = engine.kb();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut reserved: BTreeSet<Code> = BTreeSet::new();
    let mut planted: Vec<(ReasonedNode, &Plant)> = Vec::new();
    for p in &cfg.plants {
        let lf = parse(&p.criterion, engine.catalog())
            .map_err(|e| HarnessError::InfeasiblePlant(format!("`{}`: {e}", p.criterion)))?;
        let node = engine.reason(&lf);
        collect_codes(&node, kb, &mut reserved);
        planted.push((node, p));
    }
    let pool: Vec<(Domain, Code)> = code_pool(kb).into_iter().filter(|(_, c)| !reserved.contains(c)).collect();

    let mut profiles: BTreeMap<i64, Profile> = BTreeMap::new();
    let planter = Planter { kb, reference: cfg.reference_date };
    for (node, plant) in &planted {
        for &pid in &plant.persons {
            if pid < 1 || pid as usize > cfg.patients {
                return Err(HarnessError::InfeasiblePlant(format!("person {pid} is outside 1..={}", cfg.patients)));
            }
            let profile = profiles.entry(pid).or_default();
            planter
                .realize(node, pid, profile, &mut rng)
                .map_err(|m| HarnessError::InfeasiblePlant(format!("`{}` for person {pid}: {m}", plant.criterion)))?;
        }
    }
    for (pid, p) in &profiles {
        if let Some(e) = p.events.iter().find(|e| p.forbidden.contains(&e.code)) {
            return Err(HarnessError::InfeasiblePlant(format!("person {pid} must both have and lack code {}", e.code)));
        }
    }

    let start = NaiveDate::from_ymd_opt(2015, 1, 1).unwrap().and_time(NaiveTime::MIN);
    let span_minutes = 8 * 365 * 1440;
    let mut db = SyntheticDb::default();
    for pid in 1..=cfg.patients as i64 {
        let profile = profiles.remove(&pid).unwrap_or_default();
        let female = profile.female.unwrap_or_else(|| rng.gen_bool(0.5));
        let birth_date = match &profile.ages {
            None => random_date(&mut rng, 1930, 2005),
            Some(ages) => planter.birth_for(ages, &mut rng),
        };
        db.persons.push(Person { person_id: pid, birth_date, female });
        db.events.extend(profile.events);
        if pool.is_empty() {
            continue;
        }
        for _ in 0..rng.gen_range(0..=12) {
            let at = start + Duration::minutes(rng.gen_range(0..span_minutes));
            db.events.push(background_event(&mut rng, pid, &pool, at));
            if rng.gen_bool(0.3) {
                let later = at + Duration::minutes(rng.gen_range(0..=600));
                db.events.push(background_event(&mut rng, pid, &pool, later));
            }
        }
    }
    Ok(db)
}

fn background_event(rng: &mut ChaCha8Rng, pid: i64, pool: &[(Domain, Code)], at: NaiveDateTime) -> Event {
    let (domain, code) = pool.choose(rng).expect("non-empty pool").clone();
    let value = (domain == Domain::Measurement).then(|| rng.gen_range(0..5000) as f64 / 10.0);
    Event { person_id: pid, domain, code, at, value }
}

fn random_date(rng: &mut impl Rng, from_year: i32, to_year: i32) -> NaiveDate {
    let from = NaiveDate::from_ymd_opt(from_year, 1, 1).unwrap();
    let to = NaiveDate::from_ymd_opt(to_year, 12, 31).unwrap();
    from + Duration::days(rng.gen_range(0..=(to - from).num_days()))
}

fn collect_codes(n: &ReasonedNode, kb: &KnowledgeBase, out: &mut BTreeSet<Code>) {
    for cui in &n.concepts.members {
        if let Some(c) = kb.concept(cui) {
            out.extend(c.codes.iter().cloned());
        }
    }
    for c in
        n.children.iter().chain(&n.inputs).chain(n.temporal.iter().map(|t| &t.anchor)).chain(n.consequent.as_deref())
    {
        collect_codes(c, kb, out);
    }
}

/// What a planted person must satisfy.
#[derive(Debug, Default, Clone)]
struct Profile {
    female: Option<bool>,
    /// Allowed integer ages at the reference date.
    ages: Option<BTreeSet<i64>>,
    events: Vec<Event>,
    forbidden: BTreeSet<Code>,
}

impl Profile {
    fn restrict_ages(&mut self, allowed: impl Fn(i64) -> bool) -> Result<(), String> {
        let ages: BTreeSet<i64> = match &self.ages {
            None => (0..=MAX_AGE).filter(|a| allowed(*a)).collect(),
            Some(s) => s.iter().copied().filter(|a| allowed(*a)).collect(),
        };
        if ages.is_empty() {
            return Err("no age satisfies every age constraint".into());
        }
        self.ages = Some(ages);
        Ok(())
    }

    fn set_gender(&mut self, female: bool) -> Result<(), String> {
        match self.female {
            Some(f) if f != female => Err("conflicting gender requirements".into()),
            _ => {
                self.female = Some(female);
                Ok(())
            }
        }
    }
}

struct Planter<'a> {
    kb: &'a KnowledgeBase,
    reference: NaiveDate,
}

impl Planter<'_> {
    fn realize(&self, n: &ReasonedNode, pid: i64, p: &mut Profile, rng: &mut ChaCha8Rng) -> Result<(), String> {
        if !n.is_computable() {
            return Err(format!("`{}` is not computable", n.function));
        }
        match n.function.as_str() {
            "intersect" => {
                for c in &n.children {
                    self.realize(c, pid, p, rng)?;
                }
            }
            "union" => {
                let mut last = "union without a plantable operand".to_string();
                let mut done = false;
                for c in n.children.iter().filter(|c| c.is_computable()) {
                    let mut trial = p.clone();
                    match self.realize(c, pid, &mut trial, rng) {
                        Ok(()) => {
                            *p = trial;
                            done = true;
                            break;
                        }
                        Err(e) => last = e,
                    }
                }
                if !done {
                    return Err(last);
                }
            }
            "not" => self.forbid(&n.children[0], p)?,
            "female" => p.set_gender(true)?,
            "male" => p.set_gender(false)?,
            "age" => {
                let filters = n.filters.clone();
                p.restrict_ages(|a| filters.iter().all(|f| f.op.holds(a as f64, f.value)))?
            }
            f if is_entity(f) => {
                let x = self.event_time(rng);
                self.place(n, pid, x, p, rng)?;
            }
            other => return Err(format!("cannot plant `{other}`")),
        }
        if let Some(y) = &n.consequent {
            self.realize(y, pid, p, rng)?;
        }
        Ok(())
    }

    /// A time at least ten days before the reference date, within the six
    /// years before it.
    fn event_time(&self, rng: &mut ChaCha8Rng) -> NaiveDateTime {
        let end = self.reference.and_time(NaiveTime::MIN) - Duration::days(10);
        end - Duration::minutes(rng.gen_range(0..6 * 365 * 1440))
    }

    /// Records `n` at time `x`, with its anchors placed relative to `x`.
    fn place(
        &self,
        n: &ReasonedNode,
        pid: i64,
        x: NaiveDateTime,
        p: &mut Profile,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), String> {
        let (domain, code) = self.pick_code(n, p, rng)?;
        let value = match domain {
            Domain::Measurement => Some(value_satisfying(&n.filters).ok_or("contradictory value filters")?),
            _ if n.filters.is_empty() => None,
            _ => return Err(format!("value filter on a {domain:?} record")),
        };
        p.events.push(Event { person_id: pid, domain, code, at: x, value });
        for t in &n.temporal {
            let a = &t.anchor;
            if !a.is_entity() || !a.temporal.is_empty() || a.consequent.is_some() {
                return Err("anchors must be plain entities".into());
            }
            let y = match t.relation {
                TemporalRelation::Before => x + Duration::days(1),
                TemporalRelation::After => x - Duration::days(1),
                TemporalRelation::CausedBy => x - Duration::hours(1),
                TemporalRelation::Within => {
                    let w = t.window.as_ref().and_then(window_minutes).ok_or("window has no fixed length")?;
                    x - Duration::minutes(w / 2)
                }
            };
            self.place(a, pid, y, p, rng)?;
        }
        Ok(())
    }

    fn pick_code(&self, n: &ReasonedNode, p: &Profile, rng: &mut ChaCha8Rng) -> Result<(Domain, Code), String> {
        let mut options = Vec::new();
        for cui in &n.concepts.members {
            let (Some(c), Some(d)) = (self.kb.concept(cui), Domain::of_concept(self.kb, cui)) else { continue };
            if !n.filters.is_empty() && d != Domain::Measurement {
                continue;
            }
            for code in c.codes.iter().filter(|code| d.systems().contains(&code.system) && !p.forbidden.contains(code))
            {
                options.push((d, code.clone()));
            }
        }
        options.choose(rng).cloned().ok_or_else(|| format!("no recordable code for `{}`", n.source_text()))
    }

    fn forbid(&self, n: &ReasonedNode, p: &mut Profile) -> Result<(), String> {
        match n.function.as_str() {
            "female" => p.set_gender(false),
            "male" => p.set_gender(true),
            "age" => {
                let filters = n.filters.clone();
                p.restrict_ages(|a| !filters.iter().all(|f| f.op.holds(a as f64, f.value)))
            }
            f if is_entity(f) && n.filters.is_empty() && n.temporal.is_empty() && n.consequent.is_none() => {
                for cui in &n.concepts.members {
                    if let Some(c) = self.kb.concept(cui) {
                        p.forbidden.extend(c.codes.iter().cloned());
                    }
                }
                Ok(())
            }
            other => Err(format!("cannot plant the negation of `{other}`")),
        }
    }

    fn birth_for(&self, ages: &BTreeSet<i64>, rng: &mut ChaCha8Rng) -> NaiveDate {
        let adult: Vec<i64> = ages.iter().copied().filter(|a| (18..=90).contains(a)).collect();
        let pool: Vec<i64> = if adult.is_empty() { ages.iter().copied().collect() } else { adult };
        let age = *pool.choose(rng).expect("non-empty age set");
        // birthdays giving exactly `age`: after the day `age + 1` years back, up to `age` years back
        let latest = lfq_core::codegen::years_before(self.reference, age);
        let earliest = lfq_core::codegen::years_before(self.reference, age + 1) + Duration::days(1);
        let b = earliest + Duration::days(rng.gen_range(0..=(latest - earliest).num_days()));
        debug_assert_eq!(age_on(b, self.reference), age);
        b
    }
}

/// A measurement value meeting every filter, preferring the filter
/// thresholds' neighbourhoods.
fn value_satisfying(filters: &[NumericFilter]) -> Option<f64> {
    let mut candidates = vec![100.0, 0.0, 50.0, 250.0];
    for f in filters {
        for d in [0.0, 1.0, -1.0, 0.5, -0.5, 10.0, -10.0] {
            candidates.push(f.value + d);
        }
    }
    candidates.into_iter().find(|v| filters.iter().all(|f| f.op.holds(*v, f.value)))
}
