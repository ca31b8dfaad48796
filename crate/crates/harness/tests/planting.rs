mod common;

use common::{compile, date, ids, reason};
use lfq_core::pipeline::Engine;
use lfq_harness::db::{pivot_mismatch, Variant};
use lfq_harness::{generate_db, oracle_eval, GenConfig, HarnessError, Plant, PlantFile, SqliteDb};

fn plant(criterion: &str, persons: impl IntoIterator<Item = i64>) -> Plant {
    Plant { criterion: criterion.into(), persons: persons.into_iter().collect() }
}

fn config(seed: u64, patients: usize, plants: Vec<Plant>) -> GenConfig {
    GenConfig::new(seed, patients).with_plants(PlantFile { reference_date: date("2023-01-01"), plants })
}

#[test]
fn planted_diagnosis_is_held_by_exactly_the_planted_persons() {
    let engine = Engine::fixture();
    let planted: Vec<i64> = (1..=27).map(|i| i * 37).collect();
    let db = generate_db(&config(7, 1000, vec![plant(r#"cond("cardiac arrest")"#, planted.clone())]), &engine).unwrap();
    let node = reason(&engine, r#"cond("cardiac arrest")"#);
    assert_eq!(oracle_eval(&node, &db, engine.kb(), Some(date("2023-01-01"))), Some(ids(planted.clone())));
    for v in [Variant::Tall, Variant::Pivoted] {
        let sql = compile(&engine, r#"cond("cardiac arrest")"#, engine.smm(v.smm_name()).unwrap(), Some("2023-01-01"))
            .unwrap()
            .sql;
        assert_eq!(SqliteDb::load(&db, v).unwrap().person_ids(&sql).unwrap(), ids(planted.clone()), "{v:?}");
    }
}

#[test]
fn compound_plants_satisfy_their_criteria() {
    let engine = Engine::fixture();
    let criteria = [
        r#"lab("serum creatinine").num_filter(eq(op(GT), val("1.5"))).within(drug("metformin"), val("240"), unit("minutes"))"#,
        r#"intersect(female(), age().num_filter(eq(op(GTEQ), val("65"))))"#,
        r#"intersect(cond("asthma"), not(cond("hypertension")), male())"#,
        r#"cond("type 2 diabetes").before(proc("dialysis"))"#,
        r#"union(cond("pregnancy"), lab("platelet count").num_filter(eq(op(LT), val("100"))))"#,
        r#"drug("insulin").after(cond("heart failure")).if_then(age().num_filter(eq(op(LT), val("80"))))"#,
    ];
    let plants: Vec<Plant> =
        criteria.iter().enumerate().map(|(i, c)| plant(c, (1..=15).map(|k| k * 20 + i as i64))).collect();
    let db = generate_db(&config(3, 400, plants.clone()), &engine).unwrap();
    let tall = SqliteDb::load(&db, Variant::Tall).unwrap();
    let piv = SqliteDb::load(&db, Variant::Pivoted).unwrap();
    for p in &plants {
        let want = ids(p.persons.clone());
        let node = reason(&engine, &p.criterion);
        let oracle = oracle_eval(&node, &db, engine.kb(), Some(date("2023-01-01"))).unwrap();
        assert!(want.is_subset(&oracle), "{}: oracle misses planted persons", p.criterion);
        for (v, sqlite) in [(Variant::Tall, &tall), (Variant::Pivoted, &piv)] {
            let sql =
                compile(&engine, &p.criterion, engine.smm(v.smm_name()).unwrap(), Some("2023-01-01")).unwrap().sql;
            assert_eq!(sqlite.person_ids(&sql).unwrap(), oracle, "{} on {v:?}", p.criterion);
        }
    }
}

#[test]
fn infeasible_plants_are_reported() {
    let engine = Engine::fixture();
    let cases = [
        vec![plant("female()", [1]), plant("male()", [1])],
        vec![plant("intersect(female(), male())", [2])],
        vec![plant(r#"cond("asthma").num_filter(eq(op(GT), val("3")))"#, [1])],
        vec![plant(r#"cond("asthma")"#, [3]), plant(r#"not(cond("asthma"))"#, [3])],
        vec![plant(r#"age().num_filter(eq(op(GT), val("70")), eq(op(LT), val("60")))"#, [1])],
        vec![plant(r#"proc("resuscitation")"#, [1])],
        vec![plant(r#"cond("asthma")"#, [11])],
    ];
    for plants in cases {
        let desc = format!("{plants:?}");
        let r = generate_db(&config(1, 10, plants), &engine);
        assert!(matches!(r, Err(HarnessError::InfeasiblePlant(_))), "{desc}: {r:?}");
    }
}

#[test]
fn same_seed_gives_identical_files() {
    let engine = Engine::fixture();
    let plants = vec![plant(r#"cond("asthma")"#, [1, 2, 3])];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        generate_db(&config(11, 200, plants.clone()), &engine).unwrap().write(dir.path()).unwrap();
    }
    let mut files = 0;
    for v in ["tall", "pivoted"] {
        for entry in std::fs::read_dir(a.path().join(v)).unwrap() {
            let name = entry.unwrap().file_name();
            let left = std::fs::read(a.path().join(v).join(&name)).unwrap();
            let right = std::fs::read(b.path().join(v).join(&name)).unwrap();
            assert!(left == right, "{v}/{name:?} differs");
            files += 1;
        }
    }
    assert_eq!(files, 2 * 2 + 5 + 8);
    let other = generate_db(&config(12, 200, plants), &engine).unwrap();
    assert_ne!(other, lfq_harness::SyntheticDb::read(a.path()).unwrap());
}

#[test]
fn layouts_are_pivot_consistent_and_reload_from_files() {
    let engine = Engine::fixture();
    let db = generate_db(&GenConfig::new(5, 300), &engine).unwrap();
    assert_eq!(db.pivot_mismatch(), None);
    let dir = tempfile::tempdir().unwrap();
    db.write(dir.path()).unwrap();
    let lf = r#"lab("platelet count").num_filter(eq(op(LT), val("150")))"#;
    for v in [Variant::Tall, Variant::Pivoted] {
        let sql = compile(&engine, lf, engine.smm(v.smm_name()).unwrap(), None).unwrap().sql;
        let from_files = SqliteDb::open_dir(&dir.path().join(v.dir_name())).unwrap().person_ids(&sql).unwrap();
        assert_eq!(from_files, SqliteDb::load(&db, v).unwrap().person_ids(&sql).unwrap());
        assert!(!from_files.is_empty());
    }
}

#[test]
fn pivot_check_detects_a_dropped_row() {
    let engine = Engine::fixture();
    let db = generate_db(&GenConfig::new(5, 50), &engine).unwrap();
    let tall = db.tables(Variant::Tall);
    let mut piv = db.tables(Variant::Pivoted);
    assert_eq!(pivot_mismatch(&tall, &piv), None);
    let cbc = piv.iter_mut().find(|t| t.name == "complete_blood_counts").unwrap();
    assert!(!cbc.rows.is_empty());
    cbc.rows.pop();
    assert!(pivot_mismatch(&tall, &piv).is_some());
}

#[test]
fn empty_database_gives_empty_cohorts() {
    let engine = Engine::fixture();
    let db = lfq_harness::SyntheticDb::default();
    for lf in [r#"cond("asthma")"#, "female()", r#"not(cond("asthma"))"#] {
        let node = reason(&engine, lf);
        assert_eq!(oracle_eval(&node, &db, engine.kb(), Some(date("2020-01-01"))), Some(ids([])));
        for v in [Variant::Tall, Variant::Pivoted] {
            let sql = compile(&engine, lf, engine.smm(v.smm_name()).unwrap(), Some("2020-01-01")).unwrap().sql;
            assert!(SqliteDb::load(&db, v).unwrap().person_ids(&sql).unwrap().is_empty());
        }
    }
}
