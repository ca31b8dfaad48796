//! HTTP API: query generation, plan execution against harness databases,
//! mapping listing and concept search.
//!
//! | method | path            | body / query                         |
//! |--------|-----------------|--------------------------------------|
//! | GET    | `/api/health`   |                                      |
//! | GET    | `/api/smm`      |                                      |
//! | GET    | `/api/concepts` | `q`, optional `limit`                |
//! | POST   | `/api/queries`  | `QueryRequest`                       |
//! | POST   | `/api/execute`  | `ExecuteRequest`                     |
//!
//! Errors are `{"error": <code>, "message": <text>}` with a 4xx status.

mod config;

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lfq_core::codegen::QueryPlan;
use lfq_core::pipeline::{plan_id, Engine, QueryRequest, QueryResponse};
use lfq_core::smm::SemanticMetadataMapping;
use lfq_harness::db::Variant;
use lfq_harness::exec::LineResult;
use lfq_harness::{execute, recall_curve, HarnessError, RecallCurve, SqliteDb};
use serde::{Deserialize, Serialize};

pub use config::{Config, ConfigError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecuteRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<QueryPlan>,
    /// A plan returned earlier by `/api/queries`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan_id: Option<String>,
    /// A directory under the data directory holding `tall/` and `pivoted/`.
    pub database: String,
    #[serde(default)]
    pub skip_zero_result: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<BTreeSet<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecuteResponse {
    pub plan_id: String,
    pub lines: Vec<LineResult>,
    pub final_cohort: Option<BTreeSet<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recall: Option<RecallCurve>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptHit {
    pub cui: String,
    pub name: String,
    pub semantic_types: Vec<String>,
    pub codes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

struct Failure(StatusCode, ApiError);

impl Failure {
    fn new(status: StatusCode, error: &str, message: impl Into<String>) -> Self {
        Failure(status, ApiError { error: error.into(), message: message.into(), line: None })
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

/// An opened database, keyed by name and layout directory.
type SharedDb = Arc<Mutex<SqliteDb>>;

/// Shared state: the read-only engine, plans seen so far and loaded
/// databases. Each database is behind its own lock, so executions against
/// one database run one at a time.
pub struct AppState {
    engine: Engine,
    data_dir: PathBuf,
    plans: Mutex<HashMap<String, QueryPlan>>,
    databases: Mutex<HashMap<(String, &'static str), SharedDb>>,
}

impl AppState {
    pub fn new(engine: Engine, data_dir: impl Into<PathBuf>) -> Self {
        AppState {
            engine,
            data_dir: data_dir.into(),
            plans: Mutex::new(HashMap::new()),
            databases: Mutex::new(HashMap::new()),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    fn database(&self, name: &str, variant: Variant) -> Result<SharedDb, Failure> {
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(Failure::new(
                StatusCode::BAD_REQUEST,
                "InvalidDatabase",
                format!("bad database name `{name}`"),
            ));
        }
        let key = (name.to_string(), variant.dir_name());
        if let Some(db) = self.databases.lock().unwrap().get(&key) {
            return Ok(db.clone());
        }
        let dir = self.data_dir.join(name).join(variant.dir_name());
        if !dir.join("schema.sql").is_file() {
            return Err(Failure::new(StatusCode::NOT_FOUND, "UnknownDatabase", format!("no database `{name}`")));
        }
        let db = SqliteDb::open_dir(&dir)
            .map_err(|e| Failure::new(StatusCode::INTERNAL_SERVER_ERROR, "Database", e.to_string()))?;
        let db = Arc::new(Mutex::new(db));
        self.databases.lock().unwrap().entry(key).or_insert(db.clone());
        Ok(db)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/smm", get(list_smm))
        .route("/api/concepts", get(concepts))
        .route("/api/queries", post(queries))
        .route("/api/execute", post(execute_plan))
        .with_state(state)
}

async fn health() -> &'static str {
    "ok"
}

async fn list_smm(State(s): State<Arc<AppState>>) -> Json<Vec<SemanticMetadataMapping>> {
    Json(s.engine.smms().cloned().collect())
}

#[derive(Deserialize)]
struct ConceptQuery {
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

async fn concepts(State(s): State<Arc<AppState>>, Query(q): Query<ConceptQuery>) -> Json<Vec<ConceptHit>> {
    let hits = s
        .engine
        .kb()
        .search(&q.q, q.limit.unwrap_or(20).min(200))
        .into_iter()
        .map(|c| ConceptHit {
            cui: c.cui.clone(),
            name: c.preferred_name.clone(),
            semantic_types: c.semantic_types.iter().cloned().collect(),
            codes: c.codes.iter().map(|c| c.to_string()).collect(),
        })
        .collect();
    Json(hits)
}

fn bad_json(e: axum::extract::rejection::JsonRejection) -> Failure {
    Failure::new(StatusCode::BAD_REQUEST, "InvalidRequest", e.body_text())
}

async fn queries(
    State(s): State<Arc<AppState>>,
    body: Result<Json<QueryRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<Json<QueryResponse>, Failure> {
    let Json(req) = body.map_err(bad_json)?;
    let resp = s.engine.generate(&req).map_err(|e| {
        let mut f = Failure::new(StatusCode::BAD_REQUEST, e.code(), e.to_string());
        if let lfq_core::pipeline::PipelineError::MalformedLogicalForm { line, .. }
        | lfq_core::pipeline::PipelineError::InvalidOverride { line, .. } = &e
        {
            f.1.line = Some(*line);
        }
        f
    })?;
    s.plans.lock().unwrap().insert(resp.plan_id.clone(), resp.plan.clone());
    Ok(Json(resp))
}

async fn execute_plan(
    State(s): State<Arc<AppState>>,
    body: Result<Json<ExecuteRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<Json<ExecuteResponse>, Failure> {
    let Json(req) = body.map_err(bad_json)?;
    let plan = match (&req.plan, &req.plan_id) {
        (Some(p), _) => p.clone(),
        (None, Some(id)) => s
            .plans
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| Failure::new(StatusCode::NOT_FOUND, "UnknownPlan", format!("no plan `{id}`")))?,
        (None, None) => {
            return Err(Failure::new(StatusCode::BAD_REQUEST, "InvalidRequest", "give `plan` or `plan_id`"))
        }
    };
    if let Some(g) = &req.gold {
        if g.is_empty() {
            return Err(Failure::new(StatusCode::BAD_REQUEST, "EmptyGold", HarnessError::EmptyGold.to_string()));
        }
    }
    let variant = Variant::for_smm(&plan.smm).ok_or_else(|| {
        Failure::new(StatusCode::BAD_REQUEST, "UnsupportedSmm", format!("no database layout for `{}`", plan.smm))
    })?;
    let state = s.clone();
    let result = tokio::task::spawn_blocking(move || -> Result<ExecuteResponse, Failure> {
        let db = state.database(&req.database, variant)?;
        let db = db.lock().unwrap();
        let exec = execute(&plan, &db, req.skip_zero_result).map_err(|e| match e {
            HarnessError::Execution { line, message } => Failure(
                StatusCode::UNPROCESSABLE_ENTITY,
                ApiError { error: "ExecutionError".into(), message, line: Some(line) },
            ),
            other => Failure::new(StatusCode::INTERNAL_SERVER_ERROR, "Database", other.to_string()),
        })?;
        let recall = req.gold.as_ref().map(|g| recall_curve(&exec, g)).transpose().expect("gold checked non-empty");
        Ok(ExecuteResponse { plan_id: plan_id(&plan), lines: exec.lines, final_cohort: exec.final_cohort, recall })
    })
    .await
    .map_err(|e| Failure::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))??;
    Ok(Json(result))
}

/// Binds `config.listen` and serves until interrupted.
pub async fn serve(config: &Config) -> Result<(), ConfigError> {
    let engine = config.engine()?;
    let state = Arc::new(AppState::new(engine, &config.data_dir));
    let listener = tokio::net::TcpListener::bind(&config.listen)
        .await
        .map_err(|e| ConfigError::Io { path: config.listen.clone(), message: e.to_string() })?;
    tracing::info!(addr = %config.listen, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ConfigError::Io { path: config.listen.clone(), message: e.to_string() })
}

/// Serves on an ephemeral local port in the background; for tests and
/// embedding.
pub async fn spawn(state: Arc<AppState>) -> std::io::Result<(std::net::SocketAddr, tokio::task::JoinHandle<()>)> {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    let handle = tokio::spawn(async move {
        let _ = axum::serve(listener, router(state)).await;
    });
    Ok((addr, handle))
}
