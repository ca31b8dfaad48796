//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use lfq_core::codegen::{LineStatus, SkipKind};
use lfq_core::fixture;
use lfq_core::kb::{CodeSystem, Concept, KnowledgeBase, Predicate, Triple};
use lfq_core::llf::{
    convert_style, extract_spans, parse, random_node, serialize, validate, FunctionCatalog, LfNode, Style,
};
use lfq_core::metrics::{bleu, rouge_l, tokenize};
use lfq_core::pipeline::{Engine, InputMode, QueryRequest};
use lfq_harness::check::{pinning_check, sql_oracle_equivalence, union_check};
use lfq_harness::criteria::CriteriaGenerator;
use lfq_harness::db::Variant;
use lfq_harness::{execute, generate_db, recall_curve, trial, GenConfig, Plant, PlantFile, SqliteDb};
use lfq_service::{spawn, AppState, ExecuteRequest, ExecuteResponse};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

const DIABETES: &str =
    r#"intersect(cond("Diabetic"), union(female(), male()), age().num_filter(eq(op(GT), val("65"))))"#;

fn parser_round_trip() -> Outcome {
    let start = Instant::now();
    let cat = FunctionCatalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    for i in 0..500 {
        let mut node = random_node(&mut rng, 4);
        node.assign_span_indices();
        ensure(validate(&node, &cat).is_empty(), || format!("generated tree {i} violates the catalog"))?;
        for pretty in [false, true] {
            let text = serialize(&node, pretty);
            if parse(&text, &cat).as_ref() != Ok(&node) {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(failures == 0, || format!("{failures} of 1000 round trips differ"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("500 trees, compact and pretty, 0 failures in {elapsed:.2?}"))
}

fn diabetes_example() -> Outcome {
    let cat = FunctionCatalog::builtin();
    let q = |f: &str, v: &str| LfNode::new(f).with_quoted(v);
    let mut expected =
        LfNode::new("intersect")
            .with_node(q("cond", "Diabetic"))
            .with_node(LfNode::new("union").with_node(LfNode::new("female")).with_node(LfNode::new("male")))
            .with_node(LfNode::new("age").with_predicate(LfNode::new("num_filter").with_node(
                LfNode::new("eq").with_node(LfNode::new("op").with_symbol("GT")).with_node(q("val", "65")),
            )));
    expected.assign_span_indices();
    let tree = parse(DIABETES, &cat).map_err(|e| e.to_string())?;
    ensure(tree == expected, || format!("tree differs: {tree:?}"))?;
    ensure(serialize(&tree, false) == DIABETES, || "compact serialization differs".into())?;
    let spans = extract_spans(DIABETES).map_err(|e| e.to_string())?;
    for style in [Style::SpanIndex, Style::ShiftReduce] {
        let there = convert_style(DIABETES, Style::Standard, style, None).map_err(|e| e.to_string())?;
        let back = convert_style(&there, style, Style::Standard, Some(&spans)).map_err(|e| e.to_string())?;
        ensure(back == DIABETES, || format!("{style} conversion is lossy: {back}"))?;
    }
    Ok("documented tree, byte-identical compact form, lossless span-index and shift-reduce".into())
}

fn random_text(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[u8] = b"abcdefgh xyz()\",.0123456789_";
    loop {
        let len = rng.gen_range(1..40);
        let s: String = (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char).collect();
        if !tokenize(&s).is_empty() {
            return s;
        }
    }
}

fn metrics_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let s = random_text(&mut rng);
        let b = bleu(&s, &s, 4).map_err(|e| e.to_string())?;
        let r = rouge_l(&s, &s).map_err(|e| e.to_string())?.f1;
        ensure(b == 1.0 && r == 1.0, || format!("{s:?}: bleu {b} rouge {r}"))?;
    }
    // cond ( " a " ) against cond ( " b " ): six tokens each, so no brevity
    // penalty; clipped matches are 5 of 6 unigrams, 3 of 5 bigrams, 1 of 4
    // trigrams and 0 of 3 fourgrams (smoothed to 1e-9 / 3)
    let hand = (5.0_f64 / 6.0 * (3.0 / 5.0) * (1.0 / 4.0) * (1e-9 / 3.0)).powf(0.25);
    let got = bleu(r#"cond ( "a" )"#, r#"cond ( "b" )"#, 4).map_err(|e| e.to_string())?;
    ensure((got - hand).abs() <= 1e-9, || format!("hand case {got} vs {hand}"))?;
    Ok(format!("100 random strings score 1; hand case {got:.9} matches"))
}

fn random_dag(rng: &mut ChaCha8Rng, n: usize, density: f64) -> (Vec<Concept>, Vec<Triple>) {
    let concepts = (0..n).map(|i| Concept::new(format!("N{i:03}"), format!("node {i}"))).collect();
    let mut triples = Vec::new();
    for child in 1..n {
        for parent in 0..child {
            if rng.gen_bool(density) {
                triples.push(Triple::new(format!("N{child:03}"), Predicate::Isa, format!("N{parent:03}")));
            }
        }
    }
    (concepts, triples)
}

fn bfs_closure(triples: &[Triple], root: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([root.to_string()]);
    let mut queue = VecDeque::from([root.to_string()]);
    while let Some(n) = queue.pop_front() {
        for t in triples.iter().filter(|t| t.object == n) {
            if seen.insert(t.subject.clone()) {
                queue.push_back(t.subject.clone());
            }
        }
    }
    seen
}

fn kb_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut roots = 0;
    for round in 0..50 {
        let n = rng.gen_range(1..=200);
        let density = rng.gen_range(0.002..0.05);
        let (concepts, triples) = random_dag(&mut rng, n, density);
        let kb = KnowledgeBase::from_parts(concepts, triples.clone()).map_err(|e| e.to_string())?;
        for i in 0..n {
            let root = format!("N{i:03}");
            let got = kb.descendants(&root).map_err(|e| e.to_string())?;
            ensure(got.members == bfs_closure(&triples, &root), || format!("round {round} root {root}"))?;
            roots += 1;
        }
    }
    let kb = fixture::knowledge_base();
    let cui_of = |name: &str| kb.concepts().find(|c| c.preferred_name == name).map(|c| c.cui.clone());
    let t2dm = kb.descendants("C0011860").map_err(|e| e.to_string())?;
    ensure(t2dm.contains("C2874072"), || "type 2 diabetes misses C2874072".into())?;
    let sleep = kb.descendants("C0851578").map_err(|e| e.to_string())?;
    for name in ["Drowsiness", "Snoring"] {
        let cui = cui_of(name).ok_or_else(|| format!("no concept named {name}"))?;
        ensure(sleep.contains(&cui), || format!("sleep disorder misses {name}"))?;
    }
    Ok(format!("50 DAGs, {roots} roots equal BFS; diabetes and sleep-disorder expansions present"))
}

fn multi_hop_chain() -> Outcome {
    const ASTHMA: &str = "C0004096";
    const METHYLPRED: &str = "C0025815";
    const MYCOSIS: &str = "C0026946";
    const RESP_FN: &str = "C9000120";
    let kb = fixture::knowledge_base();
    let result = kb.contraindications_to_drugs_for_conditions_affecting(RESP_FN).map_err(|e| e.to_string())?;
    let p = result.provenance_of(MYCOSIS).ok_or("mycosis not returned")?;
    let expected = vec![
        Triple::new(ASTHMA, Predicate::Affects, RESP_FN),
        Triple::new(METHYLPRED, Predicate::Treats, ASTHMA),
        Triple::new(METHYLPRED, Predicate::ContraindicatedWith, MYCOSIS),
    ];
    ensure(p.path == expected, || format!("path {:?}", p.path))?;
    Ok("mycosis via asthma, methylprednisolone".into())
}

fn tfidf_filter() -> Outcome {
    let n = fixture::normalizer();
    let got = n.normalize("covid-19 infection", &BTreeSet::from(["dsyn".to_string()]));
    let cuis: Vec<&str> = got.iter().map(|c| c.cui.as_str()).collect();
    ensure(cuis.contains(&"C5203670"), || format!("COVID-19 concept dropped: {cuis:?}"))?;
    ensure(!cuis.contains(&"C3714514"), || format!("generic infection kept: {cuis:?}"))?;
    Ok(format!("kept {cuis:?}"))
}

fn lab_normalization() -> Outcome {
    let n = fixture::normalizer();
    let kb = fixture::knowledge_base();
    for (text, loinc) in [("platelet count", "777-3"), ("serum creatinine", "2160-0")] {
        let c = n.normalize_lab(text).map_err(|e| format!("{text}: {e}"))?;
        let codes: Vec<&str> = kb.concept(&c.cui).map(|c| c.codes_in(CodeSystem::Loinc).collect()).unwrap_or_default();
        ensure(codes.contains(&loinc), || format!("{text} -> {} has {codes:?}", c.cui))?;
    }
    ensure(n.normalize_lab("resuscitation").is_err(), || "resuscitation normalized to a lab".into())?;
    let engine = Engine::fixture();
    let mut req = QueryRequest::new("omop_lite_tall", InputMode::LogicalForm);
    req.inclusion = vec![r#"intersect(cond("cardiac arrest"), proc("resuscitation"))"#.into()];
    let resp = engine.generate(&req).map_err(|e| e.to_string())?;
    let line = &resp.lines[0];
    ensure(line.status == LineStatus::Skipped, || format!("line status {:?}", line.status))?;
    let kind = line.reason.as_ref().map(|r| r.kind);
    ensure(kind == Some(SkipKind::NonComputable), || format!("line reason {kind:?}"))?;
    Ok("777-3, 2160-0; resuscitation line Skipped as NonComputable".into())
}

fn sql_oracle() -> Outcome {
    let start = Instant::now();
    let report = sql_oracle_equivalence(&Engine::fixture(), 20, 1000, 10).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(report.passed(200), || format!("{report:?}"))?;
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} tall, {} pivoted, {} cross-layout pairs; {} non-empty, {} temporal, {} with set difference; 0 mismatches in {elapsed:.1?}",
        report.tall_pairs, report.pivoted_pairs, report.cross_pairs, report.non_empty, report.temporal, report.difference
    ))
}

fn union_and_pinning() -> Outcome {
    let engine = Engine::fixture();
    let t2dm = r#"cond("type 2 diabetes")"#;
    let plants = vec![Plant { criterion: t2dm.into(), persons: (1..=60).collect() }];
    let cfg = GenConfig::new(21, 1000).with_plants(PlantFile { reference_date: date("2023-01-01"), plants });
    let db = generate_db(&cfg, &engine).map_err(|e| e.to_string())?;
    let u = union_check(&engine, &db, "omop_lite_pivoted", t2dm, None).map_err(|e| e.to_string())?;
    ensure(u.passed(), || format!("{u:?}"))?;

    let db = generate_db(&GenConfig::new(22, 1000), &engine).map_err(|e| e.to_string())?;
    let gen = CriteriaGenerator::new(&fixture::lexicon());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut criteria: Vec<String> = vec![
        t2dm.into(),
        r#"lab("platelet count").num_filter(eq(op(LT), val("100")))"#.into(),
        r#"lab("serum creatinine").within(drug("metformin"), val("2"), unit("days"))"#.into(),
        r#"intersect(female(), age().num_filter(eq(op(GTEQ), val("18"))))"#.into(),
    ];
    criteria.extend((0..30).map(|_| serialize(&gen.criterion(&mut rng, 1), false)));
    let p = pinning_check(&engine, &db, &criteria, date("2020-06-30"), 9).map_err(|e| e.to_string())?;
    ensure(p.passed(), || format!("{p:?}"))?;
    Ok(format!(
        "UNION over {} tables equals union of parts ({} persons); {} records injected, {} pinned queries unchanged, {} unpinned queries changed",
        u.parts.len(),
        u.union.len(),
        p.injected,
        p.criteria,
        p.changed_unpinned
    ))
}

fn longitudinal_recall() -> Outcome {
    let engine = Engine::fixture();
    let cfg = GenConfig::new(trial::SEED, trial::PATIENTS).with_plants(trial::plants());
    let db = generate_db(&cfg, &engine).map_err(|e| e.to_string())?;
    for v in [Variant::Tall, Variant::Pivoted] {
        let plan = engine.generate(&trial::trial().request(v.smm_name())).map_err(|e| e.to_string())?.plan;
        let sqlite = SqliteDb::load(&db, v).map_err(|e| e.to_string())?;
        let exec = execute(&plan, &sqlite, false).map_err(|e| e.to_string())?;
        let curve = recall_curve(&exec, &trial::gold()).map_err(|e| e.to_string())?;
        ensure(curve.to_tsv() == trial::RECALL, || format!("{v:?} curve:\n{}", curve.to_tsv()))?;
        let skipped = &exec.lines[3];
        ensure(skipped.status == LineStatus::Skipped, || "line 4 executed".into())?;
        ensure(skipped.cumulative == exec.lines[2].cumulative, || "line 4 did not carry the cohort forward".into())?;
    }
    let series: Vec<String> =
        trial::RECALL.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap().to_string()).collect();
    Ok(format!("both layouts reproduce {}", series.join(", ")))
}

fn service_round_trip() -> Outcome {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let data = tempfile::tempdir().map_err(|e| e.to_string())?;
        let engine = Engine::fixture();
        let cfg = GenConfig::new(trial::SEED, trial::PATIENTS).with_plants(trial::plants());
        let db = generate_db(&cfg, &engine).map_err(|e| e.to_string())?;
        db.write(&data.path().join("trial")).map_err(|e| e.to_string())?;
        let (addr, _) =
            spawn(Arc::new(AppState::new(Engine::fixture(), data.path()))).await.map_err(|e| e.to_string())?;
        let client = reqwest::Client::new();
        let post = |path: &str, body: Vec<u8>| {
            client.post(format!("http://{addr}{path}")).header("content-type", "application/json").body(body).send()
        };
        for v in [Variant::Tall, Variant::Pivoted] {
            let req = trial::trial().request(v.smm_name());
            let local = engine.generate(&req).map_err(|e| e.to_string())?;
            let body = serde_json::to_vec(&req).unwrap();
            let got = post("/api/queries", body)
                .await
                .map_err(|e| e.to_string())?
                .bytes()
                .await
                .map_err(|e| e.to_string())?;
            ensure(got.as_ref() == serde_json::to_vec(&local).unwrap().as_slice(), || {
                format!("{v:?} /api/queries differs")
            })?;

            let exec_req = ExecuteRequest {
                plan: None,
                plan_id: Some(local.plan_id.clone()),
                database: "trial".into(),
                skip_zero_result: false,
                gold: Some(trial::gold()),
            };
            let body = serde_json::to_vec(&exec_req).unwrap();
            let got = post("/api/execute", body)
                .await
                .map_err(|e| e.to_string())?
                .bytes()
                .await
                .map_err(|e| e.to_string())?;
            let sqlite = SqliteDb::load(&db, v).map_err(|e| e.to_string())?;
            let exec = execute(&local.plan, &sqlite, false).map_err(|e| e.to_string())?;
            let expected = ExecuteResponse {
                plan_id: local.plan_id.clone(),
                recall: Some(recall_curve(&exec, &trial::gold()).map_err(|e| e.to_string())?),
                lines: exec.lines,
                final_cohort: exec.final_cohort,
            };
            ensure(got.as_ref() == serde_json::to_vec(&expected).unwrap().as_slice(), || {
                format!("{v:?} /api/execute differs")
            })?;
        }
        Ok("queries and execute responses byte-identical to in-process results for both layouts".into())
    })
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("parser round trip", parser_round_trip),
        ("diabetes example fidelity", diabetes_example),
        ("metrics sanity", metrics_sanity),
        ("knowledge base closure", kb_closure),
        ("multi-hop chain", multi_hop_chain),
        ("tf-idf filter", tfidf_filter),
        ("lab normalization", lab_normalization),
        ("codegen and oracle equivalence", sql_oracle),
        ("union and pinning", union_and_pinning),
        ("longitudinal recall", longitudinal_recall),
        ("service round trip", service_round_trip),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
