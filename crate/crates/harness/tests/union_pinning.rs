mod common;

use common::date;
use lfq_core::fixture;
use lfq_core::llf::serialize;
use lfq_core::pipeline::Engine;
use lfq_harness::check::{pinning_check, union_check};
use lfq_harness::criteria::CriteriaGenerator;
use lfq_harness::{generate_db, GenConfig, Plant, PlantFile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn union_over_two_tables_equals_union_of_single_table_cohorts() {
    let engine = Engine::fixture();
    let plants = vec![Plant { criterion: r#"cond("type 2 diabetes")"#.into(), persons: (1..=60).collect() }];
    let cfg = GenConfig::new(21, 1000).with_plants(PlantFile { reference_date: date("2023-01-01"), plants });
    let db = generate_db(&cfg, &engine).unwrap();
    let check = union_check(&engine, &db, "omop_lite_pivoted", r#"cond("type 2 diabetes")"#, None).unwrap();
    assert_eq!(check.parts.iter().map(|(t, _)| t.as_str()).collect::<Vec<_>>(), ["diagnoses", "problem_list"]);
    assert!(check.passed(), "{check:?}");
    assert_eq!(check.union.len(), 60);
}

#[test]
fn post_pin_records_change_no_cohort() {
    let engine = Engine::fixture();
    let db = generate_db(&GenConfig::new(22, 1000), &engine).unwrap();
    let mut criteria: Vec<String> = [
        r#"cond("type 2 diabetes")"#,
        r#"lab("platelet count").num_filter(eq(op(LT), val("100")))"#,
        r#"lab("serum creatinine").within(drug("metformin"), val("2"), unit("days"))"#,
        r#"not(cond("pregnancy"))"#,
        r#"intersect(female(), age().num_filter(eq(op(GTEQ), val("18"))))"#,
        r#"cond("type 2 diabetes").if_then(proc("dialysis"))"#,
    ]
    .map(String::from)
    .to_vec();
    let gen = CriteriaGenerator::new(&fixture::lexicon());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    criteria.extend((0..30).map(|_| serialize(&gen.criterion(&mut rng, 1), false)));
    let check = pinning_check(&engine, &db, &criteria, date("2020-06-30"), 9).unwrap();
    assert!(check.passed(), "{check:?}");
    assert!(check.criteria >= 40, "{check:?}");
}
