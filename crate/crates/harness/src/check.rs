//! Randomized comparison of executed SQL against the oracle.

use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate, NaiveTime};
use lfq_core::codegen::{compile_line, map_criterion, CompileOptions};
use lfq_core::fixture;
use lfq_core::kb::{Code, KnowledgeBase};
use lfq_core::llf::{parse, serialize};
use lfq_core::pipeline::Engine;
use lfq_core::reason::ReasonedNode;
use lfq_core::smm::SemanticMetadataMapping;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria::CriteriaGenerator;
use crate::db::{Domain, Event, Person, SyntheticDb, Variant};
use crate::exec::SqliteDb;
use crate::generate::{generate_db, GenConfig};
use crate::oracle::oracle_eval;
use crate::HarnessError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Compiled (criterion, database) pairs per layout.
    pub tall_pairs: usize,
    pub pivoted_pairs: usize,
    /// Pairs compiled for both layouts.
    pub cross_pairs: usize,
    /// Compiled pairs with a non-empty cohort.
    pub non_empty: usize,
    /// Compiled pairs whose SQL has a temporal join or a set difference.
    pub temporal: usize,
    pub difference: usize,
    pub mismatches: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self, min_pairs: usize) -> bool {
        self.mismatches.is_empty() && self.tall_pairs >= min_pairs && self.pivoted_pairs >= min_pairs
    }
}

/// For each of `databases` seeded databases of `patients` persons, draws
/// random criteria until `per_db` compile against both layouts, then
/// compares SQL cohorts with the oracle and the two layouts with each other.
pub fn sql_oracle_equivalence(
    engine: &Engine,
    databases: u64,
    patients: usize,
    per_db: usize,
) -> Result<EquivalenceReport, HarnessError> {
    let gen = CriteriaGenerator::new(&fixture::lexicon());
    let tall_smm = engine.smm(Variant::Tall.smm_name()).expect("bundled mapping");
    let piv_smm = engine.smm(Variant::Pivoted.smm_name()).expect("bundled mapping");
    let mut report = EquivalenceReport::default();
    for seed in 0..databases {
        let db = generate_db(&GenConfig::new(seed, patients), engine)?;
        let tall = SqliteDb::load(&db, Variant::Tall)?;
        let piv = SqliteDb::load(&db, Variant::Pivoted)?;
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let mut done = 0;
        let mut attempts = 0;
        while done < per_db && attempts < per_db * 50 {
            attempts += 1;
            let lf = gen.criterion(&mut rng, 2);
            let text = serialize(&lf, false);
            let node = engine.reason(&lf);
            let opts = if rng.gen_bool(0.7) {
                CompileOptions::pinned(NaiveDate::from_ymd_opt(2015 + rng.gen_range(0..8), 6, 30).unwrap())
            } else {
                CompileOptions::default()
            };
            let t = compile_line(&node, tall_smm, engine.kb(), &opts);
            let p = compile_line(&node, piv_smm, engine.kb(), &opts);
            if t.is_err() && p.is_err() {
                continue;
            }
            let expected = oracle_eval(&node, &db, engine.kb(), opts.pin_date);
            let mut cohorts = Vec::new();
            for (name, line, sqlite) in [("tall", &t, &tall), ("pivoted", &p, &piv)] {
                let Ok(line) = line else { continue };
                let got = sqlite
                    .person_ids(&line.sql)
                    .map_err(|e| HarnessError::Execution { line: 0, message: format!("{text}: {e}") })?;
                match &expected {
                    None => report.mismatches.push(format!("seed {seed} {name}: oracle undefined for {text}")),
                    Some(exp) if *exp != got => report.mismatches.push(format!(
                        "seed {seed} {name}: {text}\n  sql {} ids, oracle {} ids\n  {}",
                        got.len(),
                        exp.len(),
                        line.sql
                    )),
                    Some(_) => {}
                }
                if name == "tall" {
                    report.tall_pairs += 1;
                } else {
                    report.pivoted_pairs += 1;
                }
                report.temporal += line.sql.contains("EXISTS") as usize;
                report.difference += line.sql.contains("EXCEPT") as usize;
                if !got.is_empty() {
                    report.non_empty += 1;
                }
                cohorts.push(got);
            }
            if let [a, b] = cohorts.as_slice() {
                report.cross_pairs += 1;
                if a != b {
                    report.mismatches.push(format!("seed {seed}: tall and pivoted differ for {text}"));
                }
                done += 1;
            }
        }
    }
    Ok(report)
}

/// Cohorts of a criterion compiled to a UNION over several tables, and of
/// the same criterion against each table alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionCheck {
    pub sql: String,
    pub union: BTreeSet<i64>,
    pub parts: Vec<(String, BTreeSet<i64>)>,
}

impl UnionCheck {
    pub fn passed(&self) -> bool {
        let joined: BTreeSet<i64> = self.parts.iter().flat_map(|(_, c)| c.iter().copied()).collect();
        self.sql.contains(" UNION ")
            && self.parts.len() >= 2
            && self.parts.iter().all(|(_, c)| !c.is_empty())
            && joined == self.union
    }
}

/// Compiles `criterion` against `smm_name` and against one single-table
/// restriction of that mapping per target table.
pub fn union_check(
    engine: &Engine,
    db: &SyntheticDb,
    smm_name: &str,
    criterion: &str,
    pin: Option<NaiveDate>,
) -> Result<UnionCheck, HarnessError> {
    let smm = engine.smm(smm_name).ok_or_else(|| HarnessError::Parse(format!("unknown mapping `{smm_name}`")))?;
    let variant = Variant::for_smm(smm_name)
        .ok_or_else(|| HarnessError::Parse(format!("no synthetic layout for `{smm_name}`")))?;
    let lf = parse(criterion, engine.catalog()).map_err(|e| HarnessError::Parse(e.to_string()))?;
    let node = engine.reason(&lf);
    let opts = CompileOptions { pin_date: pin };
    let sqlite = SqliteDb::load(db, variant)?;
    let run = |smm: &SemanticMetadataMapping| -> Result<(String, BTreeSet<i64>), HarnessError> {
        let line = compile_line(&node, smm, engine.kb(), &opts)
            .map_err(|e| HarnessError::Execution { line: 0, message: e.to_string() })?;
        let ids = sqlite.person_ids(&line.sql)?;
        Ok((line.sql, ids))
    };
    let (sql, union) = run(smm)?;
    let tables: BTreeSet<String> = map_criterion(&node, smm, engine.kb()).into_iter().map(|t| t.table).collect();
    let mut parts = Vec::new();
    for table in tables {
        let mut single = smm.clone();
        single.tables.retain(|t| t.table_name == table);
        parts.push((table, run(&single)?.1));
    }
    Ok(UnionCheck { sql, union, parts })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PinCheck {
    /// Pinned queries compiled, counting each layout.
    pub criteria: usize,
    pub injected: usize,
    /// Criteria whose pinned cohort changed after injection.
    pub changed: Vec<String>,
    /// Criteria whose unpinned cohort changed, showing the injected records
    /// are visible without a pin.
    pub changed_unpinned: usize,
}

impl PinCheck {
    pub fn passed(&self) -> bool {
        self.changed.is_empty() && self.changed_unpinned > 0 && self.injected == 100
    }
}

/// Compiles `criteria` with `pin`, then injects 100 records dated after it
/// (90 events on existing persons, 10 persons born after it with an event
/// each) and re-runs every query on both layouts.
pub fn pinning_check(
    engine: &Engine,
    db: &SyntheticDb,
    criteria: &[String],
    pin: NaiveDate,
    seed: u64,
) -> Result<PinCheck, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kb = engine.kb();
    let mut nodes = Vec::new();
    let mut codes = BTreeSet::new();
    for c in criteria {
        let lf = parse(c, engine.catalog()).map_err(|e| HarnessError::Parse(format!("{c}: {e}")))?;
        let node = engine.reason(&lf);
        collect_recordable(&node, kb, &mut codes);
        nodes.push((c.clone(), node));
    }
    let codes: Vec<(Domain, Code)> = codes.into_iter().collect();
    if codes.is_empty() {
        return Err(HarnessError::Parse("criteria mention no recordable codes".into()));
    }
    let mut after = db.clone();
    let first = pin.succ_opt().expect("date in range").and_time(NaiveTime::MIN);
    let when = |rng: &mut ChaCha8Rng| first + Duration::minutes(rng.gen_range(0..2 * 365 * 1440));
    let next_id = db.persons.iter().map(|p| p.person_id).max().unwrap_or(0) + 1;
    let mut injected = 0;
    for i in 0..10 {
        let person_id = next_id + i;
        after.persons.push(Person { person_id, birth_date: pin + Duration::days(1 + i), female: i % 2 == 0 });
        injected += 1;
        let (domain, code) = codes.choose(&mut rng).unwrap().clone();
        let value = (domain == Domain::Measurement).then(|| rng.gen_range(0..5000) as f64 / 10.0);
        after.events.push(Event { person_id, domain, code, at: when(&mut rng), value });
    }
    while injected < 100 && !db.persons.is_empty() {
        let person_id = db.persons.choose(&mut rng).unwrap().person_id;
        let (domain, code) = codes.choose(&mut rng).unwrap().clone();
        let value = (domain == Domain::Measurement).then(|| rng.gen_range(0..5000) as f64 / 10.0);
        after.events.push(Event { person_id, domain, code, at: when(&mut rng), value });
        injected += 1;
    }
    let mut report = PinCheck { injected, ..PinCheck::default() };
    for variant in [Variant::Tall, Variant::Pivoted] {
        let smm = engine.smm(variant.smm_name()).expect("bundled mapping");
        let before_db = SqliteDb::load(db, variant)?;
        let after_db = SqliteDb::load(&after, variant)?;
        for (text, node) in &nodes {
            for (opts, pinned) in [(CompileOptions::pinned(pin), true), (CompileOptions::default(), false)] {
                let Ok(line) = compile_line(node, smm, kb, &opts) else { continue };
                let a = before_db.person_ids(&line.sql)?;
                let b = after_db.person_ids(&line.sql)?;
                if pinned {
                    report.criteria += 1;
                    if a != b {
                        report.changed.push(format!("{variant:?}: {text}"));
                    }
                } else if a != b {
                    report.changed_unpinned += 1;
                }
            }
        }
    }
    Ok(report)
}

fn collect_recordable(n: &ReasonedNode, kb: &KnowledgeBase, out: &mut BTreeSet<(Domain, Code)>) {
    for cui in &n.concepts.members {
        if let (Some(c), Some(d)) = (kb.concept(cui), Domain::of_concept(kb, cui)) {
            out.extend(c.codes.iter().filter(|code| d.systems().contains(&code.system)).map(|code| (d, code.clone())));
        }
    }
    for c in n.children.iter().chain(n.temporal.iter().map(|t| &t.anchor)).chain(n.consequent.as_deref()) {
        collect_recordable(c, kb, out);
    }
}
