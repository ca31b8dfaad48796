use std::sync::Arc;

use lfq_core::pipeline::{Engine, QueryRequest};
use lfq_harness::db::Variant;
use lfq_harness::{execute, generate_db, recall_curve, trial, GenConfig, SqliteDb};
use lfq_service::{spawn, ApiError, AppState, ExecuteRequest, ExecuteResponse};
use serde_json::json;

struct Server {
    base: String,
    client: reqwest::Client,
    data: tempfile::TempDir,
}

async fn server() -> Server {
    let data = tempfile::tempdir().unwrap();
    let engine = Engine::fixture();
    let cfg = GenConfig::new(trial::SEED, trial::PATIENTS).with_plants(trial::plants());
    generate_db(&cfg, &engine).unwrap().write(&data.path().join("trial")).unwrap();
    let state = Arc::new(AppState::new(engine, data.path()));
    let (addr, _) = spawn(state).await.unwrap();
    Server { base: format!("http://{addr}"), client: reqwest::Client::new(), data }
}

impl Server {
    async fn post(&self, path: &str, body: &impl serde::Serialize) -> (u16, Vec<u8>) {
        let r = self.client.post(format!("{}{path}", self.base)).json(body).send().await.unwrap();
        (r.status().as_u16(), r.bytes().await.unwrap().to_vec())
    }

    async fn get(&self, path: &str) -> (u16, Vec<u8>) {
        let r = self.client.get(format!("{}{path}", self.base)).send().await.unwrap();
        (r.status().as_u16(), r.bytes().await.unwrap().to_vec())
    }
}

#[tokio::test]
async fn health_and_listing() {
    let s = server().await;
    assert_eq!(s.get("/api/health").await, (200, b"ok".to_vec()));
    let (status, body) = s.get("/api/smm").await;
    assert_eq!(status, 200);
    let names: Vec<String> = serde_json::from_slice::<Vec<serde_json::Value>>(&body)
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(names, ["figure_pivoted", "figure_tall", "omop_lite_pivoted", "omop_lite_tall"]);
    let (status, body) = s.get("/api/concepts?q=diabetes&limit=5").await;
    assert_eq!(status, 200);
    let hits: Vec<serde_json::Value> = serde_json::from_slice(&body).unwrap();
    assert!(!hits.is_empty() && hits.len() <= 5);
    assert!(hits.iter().any(|h| h["cui"] == "C0011860"), "{hits:?}");
}

#[tokio::test]
async fn unknown_mapping_is_a_400() {
    let s = server().await;
    let (status, body) = s.post("/api/queries", &QueryRequest::new("nope", Default::default())).await;
    assert_eq!(status, 400);
    let err: ApiError = serde_json::from_slice(&body).unwrap();
    assert_eq!(err.error, "UnknownSmm");
    let (status, _) = s.post("/api/queries", &json!({"inclusion": 3})).await;
    assert_eq!(status, 400);
}

#[tokio::test]
async fn round_trip_equals_in_process_results() {
    let s = server().await;
    let engine = Engine::fixture();
    for v in [Variant::Tall, Variant::Pivoted] {
        let req = trial::trial().request(v.smm_name());
        let (status, body) = s.post("/api/queries", &req).await;
        assert_eq!(status, 200);
        let local = engine.generate(&req).unwrap();
        assert_eq!(body, serde_json::to_vec(&local).unwrap(), "{v:?}");

        let exec_req = ExecuteRequest {
            plan: None,
            plan_id: Some(local.plan_id.clone()),
            database: "trial".into(),
            skip_zero_result: false,
            gold: Some(trial::gold()),
        };
        let (status, body) = s.post("/api/execute", &exec_req).await;
        assert_eq!(status, 200, "{}", String::from_utf8_lossy(&body));
        let db = SqliteDb::open_dir(&s.data.path().join("trial").join(v.dir_name())).unwrap();
        let exec = execute(&local.plan, &db, false).unwrap();
        let expected = ExecuteResponse {
            plan_id: local.plan_id.clone(),
            recall: Some(recall_curve(&exec, &trial::gold()).unwrap()),
            lines: exec.lines,
            final_cohort: exec.final_cohort,
        };
        assert_eq!(body, serde_json::to_vec(&expected).unwrap());
        assert_eq!(expected.recall.unwrap().to_tsv(), trial::RECALL);

        let inline = ExecuteRequest { plan: Some(local.plan.clone()), plan_id: None, gold: None, ..exec_req };
        let (status, body) = s.post("/api/execute", &inline).await;
        assert_eq!(status, 200);
        let got: ExecuteResponse = serde_json::from_slice(&body).unwrap();
        assert_eq!(got.final_cohort, expected.final_cohort);
    }
}

#[tokio::test]
async fn execute_errors() {
    let s = server().await;
    let engine = Engine::fixture();
    let mut plan = engine.generate(&trial::trial().request("omop_lite_tall")).unwrap().plan;
    let req = |plan, plan_id: Option<&str>, database: &str| ExecuteRequest {
        plan,
        plan_id: plan_id.map(String::from),
        database: database.into(),
        skip_zero_result: false,
        gold: None,
    };
    let code = |body: &[u8]| serde_json::from_slice::<ApiError>(body).unwrap();
    let (status, body) = s.post("/api/execute", &req(None, Some("feed"), "trial")).await;
    assert_eq!((status, code(&body).error.as_str()), (404, "UnknownPlan"));
    let (status, body) = s.post("/api/execute", &req(Some(plan.clone()), None, "missing")).await;
    assert_eq!((status, code(&body).error.as_str()), (404, "UnknownDatabase"));
    let (status, _) = s.post("/api/execute", &req(Some(plan.clone()), None, "../trial")).await;
    assert_eq!(status, 400);
    let (status, _) = s.post("/api/execute", &req(None, None, "trial")).await;
    assert_eq!(status, 400);
    plan.lines[1].sql = Some("SELECT nothing FROM nowhere".into());
    let (status, body) = s.post("/api/execute", &req(Some(plan.clone()), None, "trial")).await;
    let err = code(&body);
    assert_eq!((status, err.error.as_str(), err.line), (422, "ExecutionError", Some(2)));
    let mut gold_req = req(Some(plan), None, "trial");
    gold_req.gold = Some(Default::default());
    assert_eq!(s.post("/api/execute", &gold_req).await.0, 400);
}

#[tokio::test]
async fn concurrent_requests_agree() {
    let s = Arc::new(server().await);
    let req = trial::trial().request("omop_lite_pivoted");
    let mut tasks = Vec::new();
    for _ in 0..8 {
        let (s, req) = (s.clone(), req.clone());
        tasks.push(tokio::spawn(async move { s.post("/api/queries", &req).await }));
    }
    let mut bodies = Vec::new();
    for t in tasks {
        bodies.push(t.await.unwrap());
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}
