use lfq_core::pipeline::Engine;
use lfq_harness::check::sql_oracle_equivalence;

#[test]
fn sql_matches_oracle_on_both_layouts() {
    let engine = Engine::fixture();
    let report = sql_oracle_equivalence(&engine, 20, 1000, 10).unwrap();
    for m in report.mismatches.iter().take(10) {
        eprintln!("{m}");
    }
    eprintln!("{report:?}");
    assert!(report.mismatches.is_empty(), "{} mismatches", report.mismatches.len());
    assert!(report.tall_pairs >= 200 && report.pivoted_pairs >= 200, "{report:?}");
    assert!(report.non_empty * 4 >= report.tall_pairs + report.pivoted_pairs, "too many empty cohorts: {report:?}");
}
