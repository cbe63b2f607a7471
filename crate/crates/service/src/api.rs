//! HTTP routes. Every body is JSON; errors are
//! `{"error": code, "message": text, "details": ...}`. See `docs/api.md`.

use crate::gallery::{Category, ImageTask};
use crate::protocol::{machine_executor_round, Endpoint, RoundOptions, RoundOutcome};
use crate::session::{DescriptionSession, ExecutionSession, SessionError, SessionStatus};
use crate::store::{Store, StoreError};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hexagons_core::dataset::{to_jsonl, DrawingProcedure, QaCategory, QaLabel};
use hexagons_core::hexboard::{ActionSet, Board};
use hexagons_core::metrics::{Mode, ProcedureReport};
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Duration;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    /// `None` keeps all state in memory.
    pub data_dir: Option<PathBuf>,
    /// Idle open sessions expire after this long.
    pub session_timeout: Option<Duration>,
    /// Per-request limit when talking to machine executors.
    pub executor_timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            data_dir: None,
            session_timeout: Some(Duration::from_secs(3600)),
            executor_timeout: Duration::from_secs(10),
        }
    }
}

pub struct Service {
    config: ServiceConfig,
    store: Mutex<Store>,
    descriptions: Mutex<HashMap<String, DescriptionSession>>,
    executions: Mutex<HashMap<String, ExecutionSession>>,
    counter: AtomicU64,
}

pub type AppState = Arc<Service>;

impl Service {
    pub fn open(config: ServiceConfig) -> Result<AppState, StoreError> {
        let store = match &config.data_dir {
            Some(dir) => Store::open(dir)?,
            None => Store::in_memory(),
        };
        // Ids stay unique across restarts because the event log only grows.
        let counter = AtomicU64::new(store.event_count());
        Ok(Arc::new(Service {
            config,
            store: Mutex::new(store),
            descriptions: Mutex::default(),
            executions: Mutex::default(),
            counter,
        }))
    }

    fn next_id(&self, prefix: &str) -> String {
        format!("{prefix}-{}", self.counter.fetch_add(1, Ordering::Relaxed) + 1)
    }

    fn store(&self) -> MutexGuard<'_, Store> {
        self.store.lock().expect("store lock")
    }
}

pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    details: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code,
            message: message.into(),
            details: Value::Null,
        }
    }

    fn not_found(what: &str, id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no {what} `{id}`"))
    }

    fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": self.code, "message": self.message, "details": self.details});
        (self.status, Json(body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> ApiError {
        log::error!("store failure: {e}");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> ApiError {
        let message = e.to_string();
        let (status, code, details) = match e {
            SessionError::NotOpen(SessionStatus::Expired) => (StatusCode::GONE, "session_expired", Value::Null),
            SessionError::NotOpen(_) => (StatusCode::CONFLICT, "session_closed", Value::Null),
            SessionError::AlignmentCount { .. } | SessionError::EmptyInstruction => {
                (StatusCode::UNPROCESSABLE_ENTITY, "bad_alignment", Value::Null)
            }
            SessionError::NoSteps => (StatusCode::CONFLICT, "no_steps", Value::Null),
            SessionError::Mismatch(tiles) => (StatusCode::CONFLICT, "board_mismatch", json!({ "tiles": tiles })),
            SessionError::PastEnd { .. } | SessionError::OutOfOrder { .. } => {
                (StatusCode::CONFLICT, "sequencing", Value::Null)
            }
            SessionError::Incomplete { .. } => (StatusCode::CONFLICT, "incomplete", Value::Null),
            SessionError::Finished => (StatusCode::CONFLICT, "finished", Value::Null),
        };
        ApiError {
            status,
            code,
            message,
            details,
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(|| async { Json(json!({"status": "ok"})) }))
        .route("/api/images", get(list_images).post(add_image))
        .route("/api/images/{id}", get(get_image))
        .route("/api/description-sessions", post(create_description))
        .route("/api/description-sessions/{id}", get(get_description))
        .route("/api/description-sessions/{id}/steps", post(submit_description))
        .route("/api/description-sessions/{id}/finalize", post(finalize_description))
        .route("/api/description-sessions/{id}/discard", post(discard_description))
        .route("/api/execution-sessions", post(create_execution))
        .route("/api/execution-sessions/{id}", get(get_execution))
        .route("/api/execution-sessions/{id}/instruction", get(next_instruction))
        .route("/api/execution-sessions/{id}/steps", post(submit_execution))
        .route("/api/execution-sessions/{id}/finalize", post(finalize_execution))
        .route("/api/procedures", get(list_procedures))
        .route("/api/procedures/{id}", get(get_procedure))
        .route("/api/admin/procedures/{id}/fix", post(fix_procedure))
        .route("/api/machine-rounds", post(machine_round))
        .route("/api/reports", get(list_reports))
        .route("/api/reports/{id}", get(get_report))
        .with_state(state)
}

/// Binds and serves until the process exits.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let state = Service::open(config.clone()).map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

/// Binds `config.bind` (port 0 picks a free port) and serves in the
/// background; returns the bound address.
pub async fn spawn(config: ServiceConfig) -> std::io::Result<(SocketAddr, tokio::task::JoinHandle<()>)> {
    let state = Service::open(config.clone()).map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    let addr = listener.local_addr()?;
    let handle = tokio::spawn(async move {
        if let Err(e) = axum::serve(listener, router(state)).await {
            log::error!("server stopped: {e}");
        }
    });
    Ok((addr, handle))
}

fn procedure_json(procedure: &DrawingProcedure) -> Value {
    serde_json::from_str(to_jsonl(std::slice::from_ref(procedure), true).trim()).expect("record is JSON")
}

// --- gallery -----------------------------------------------------------

#[derive(Deserialize)]
struct ImageFilter {
    category: Option<String>,
}

async fn list_images(State(s): State<AppState>, Query(filter): Query<ImageFilter>) -> ApiResult<Json<Vec<ImageTask>>> {
    let category = match filter.category {
        Some(c) => Some(c.parse::<Category>().map_err(ApiError::bad_request)?),
        None => None,
    };
    let store = s.store();
    Ok(Json(
        store
            .gallery
            .iter()
            .filter(|t| category.is_none_or(|c| t.category == c))
            .cloned()
            .collect(),
    ))
}

#[derive(Deserialize)]
struct NewImage {
    image_id: Option<String>,
    board: Board,
    category: Category,
}

async fn add_image(State(s): State<AppState>, Json(req): Json<NewImage>) -> ApiResult<(StatusCode, Json<ImageTask>)> {
    if req.board.is_blank() {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "blank_board",
            "target board is blank",
        ));
    }
    let image_id = req.image_id.unwrap_or_else(|| s.next_id("img"));
    let mut store = s.store();
    if store.image(&image_id).is_some() {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "duplicate",
            format!("image `{image_id}` exists"),
        ));
    }
    let task = ImageTask {
        image_id,
        target_board: req.board,
        category: req.category,
    };
    store.add_image(task.clone())?;
    store.log_event(
        "image_added",
        json!({"image_id": task.image_id, "category": task.category}),
    )?;
    Ok((StatusCode::CREATED, Json(task)))
}

async fn get_image(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<ImageTask>> {
    s.store()
        .image(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::not_found("image", &id))
}

// --- description sessions ---------------------------------------------

#[derive(Deserialize)]
struct NewDescription {
    image_id: String,
}

fn description_view(session: &DescriptionSession, target: &Board) -> Value {
    json!({
        "session_id": session.session_id,
        "image_id": session.image_id,
        "status": session.status,
        "target_board": target,
        "board": session.board,
        "steps": session.steps.iter().map(|st| json!({
            "index": st.index,
            "instruction": st.instruction,
            "actions": st.actions,
            "board_after": st.board_after,
        })).collect::<Vec<_>>(),
    })
}

fn image_target(s: &Service, image_id: &str) -> ApiResult<Board> {
    s.store()
        .image(image_id)
        .map(|t| t.target_board.clone())
        .ok_or_else(|| ApiError::not_found("image", image_id))
}

async fn create_description(
    State(s): State<AppState>,
    Json(req): Json<NewDescription>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let target = image_target(&s, &req.image_id)?;
    let session = DescriptionSession::new(s.next_id("desc"), req.image_id, s.config.session_timeout);
    let view = description_view(&session, &target);
    s.store().log_event(
        "description_created",
        json!({"session_id": session.session_id, "image_id": session.image_id}),
    )?;
    s.descriptions
        .lock()
        .expect("sessions lock")
        .insert(session.session_id.clone(), session);
    Ok((StatusCode::CREATED, Json(view)))
}

fn with_description<T>(s: &Service, id: &str, f: impl FnOnce(&mut DescriptionSession) -> ApiResult<T>) -> ApiResult<T> {
    let mut sessions = s.descriptions.lock().expect("sessions lock");
    let session = sessions
        .get_mut(id)
        .ok_or_else(|| ApiError::not_found("description session", id))?;
    f(session)
}

async fn get_description(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let image_id = with_description(&s, &id, |d| Ok(d.image_id.clone()))?;
    let target = image_target(&s, &image_id)?;
    with_description(&s, &id, |d| Ok(Json(description_view(d, &target))))
}

/// `actions` aligns a one-line instruction; `alignments` gives one action
/// set per line.
#[derive(Deserialize)]
struct DescriptionStep {
    instruction: String,
    actions: Option<ActionSet>,
    alignments: Option<Vec<ActionSet>>,
}

async fn submit_description(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<DescriptionStep>,
) -> ApiResult<Json<Value>> {
    let alignments = match (req.actions, req.alignments) {
        (Some(a), None) => vec![a],
        (None, Some(list)) => list,
        _ => return Err(ApiError::bad_request("give exactly one of `actions` or `alignments`")),
    };
    let body = with_description(&s, &id, |d| {
        let added: Vec<Value> = d
            .submit(&req.instruction, alignments)?
            .iter()
            .map(|st| json!({"index": st.index, "instruction": st.instruction, "actions": st.actions}))
            .collect();
        Ok(json!({"added": added, "board": d.board, "steps": d.steps.len()}))
    })?;
    s.store()
        .log_event("description_step", json!({"session_id": id, "added": body["added"]}))?;
    Ok(Json(body))
}

async fn finalize_description(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let image_id = with_description(&s, &id, |d| Ok(d.image_id.clone()))?;
    let target = image_target(&s, &image_id)?;
    let mut store = s.store();
    let n = store.procedures.iter().filter(|p| p.image_id == image_id).count();
    let mut procedure_id = format!("{image_id}-p{}", n + 1);
    let mut k = n + 1;
    while store.procedure(&procedure_id).is_some() {
        k += 1;
        procedure_id = format!("{image_id}-p{k}");
    }
    let procedure = with_description(&s, &id, |d| Ok(d.finalize(&target, procedure_id)?))?;
    debug_assert!(procedure.validate().is_ok());
    store.put_procedure(procedure.clone())?;
    store.log_event(
        "description_finalized",
        json!({"session_id": id, "procedure_id": procedure.id}),
    )?;
    Ok(Json(json!({"procedure": procedure_json(&procedure)})))
}

async fn discard_description(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_description(&s, &id, |d| Ok(d.discard()?))?;
    s.store()
        .log_event("description_discarded", json!({"session_id": id}))?;
    Ok(Json(json!({"session_id": id, "status": SessionStatus::Discarded})))
}

// --- execution sessions -----------------------------------------------
//
// Nothing returned while a session is open reveals the target board or the
// gold actions.

#[derive(Deserialize)]
struct NewExecution {
    procedure_id: String,
}

fn gold(s: &Service, procedure_id: &str) -> ApiResult<DrawingProcedure> {
    s.store()
        .procedure(procedure_id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("procedure", procedure_id))
}

fn execution_view(e: &ExecutionSession) -> Value {
    json!({
        "session_id": e.session_id,
        "procedure_id": e.procedure_id,
        "status": e.status,
        "total": e.total,
        "cursor": e.cursor(),
    })
}

fn with_execution<T>(s: &Service, id: &str, f: impl FnOnce(&mut ExecutionSession) -> ApiResult<T>) -> ApiResult<T> {
    let mut sessions = s.executions.lock().expect("sessions lock");
    let session = sessions
        .get_mut(id)
        .ok_or_else(|| ApiError::not_found("execution session", id))?;
    f(session)
}

async fn create_execution(
    State(s): State<AppState>,
    Json(req): Json<NewExecution>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let procedure = gold(&s, &req.procedure_id)?;
    let session = ExecutionSession::new(s.next_id("exec"), &procedure, s.config.session_timeout);
    let view = execution_view(&session);
    s.store().log_event(
        "execution_created",
        json!({"session_id": session.session_id, "procedure_id": procedure.id}),
    )?;
    s.executions
        .lock()
        .expect("sessions lock")
        .insert(session.session_id.clone(), session);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_execution(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_execution(&s, &id, |e| Ok(Json(execution_view(e))))
}

async fn next_instruction(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let procedure_id = with_execution(&s, &id, |e| Ok(e.procedure_id.clone()))?;
    let procedure = gold(&s, &procedure_id)?;
    with_execution(&s, &id, |e| {
        Ok(Json(
            serde_json::to_value(e.next_instruction(&procedure)?).expect("view"),
        ))
    })
}

#[derive(Deserialize)]
struct ExecutionStep {
    index: usize,
    actions: ActionSet,
}

async fn submit_execution(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<ExecutionStep>,
) -> ApiResult<Json<Value>> {
    let view = with_execution(&s, &id, |e| {
        e.submit(req.index, req.actions.clone())?;
        Ok(execution_view(e))
    })?;
    s.store().log_event(
        "execution_step",
        json!({"session_id": id, "index": req.index, "actions": req.actions}),
    )?;
    Ok(Json(
        json!({"accepted": req.index, "cursor": view["cursor"], "total": view["total"]}),
    ))
}

fn summary(report: &ProcedureReport) -> Value {
    json!({
        "step_em": {"board": report.macro_em(Mode::Board), "action": report.macro_em(Mode::Action)},
        "procedure_em": {"board": report.procedure_em(Mode::Board), "action": report.procedure_em(Mode::Action)},
    })
}

async fn finalize_execution(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let procedure_id = with_execution(&s, &id, |e| Ok(e.procedure_id.clone()))?;
    let procedure = gold(&s, &procedure_id)?;
    let (report, submissions) = with_execution(&s, &id, |e| Ok((e.finalize(&procedure)?, e.submissions.clone())))?;
    let report_id = s.next_id("report");
    let record = json!({
        "report_id": report_id,
        "kind": "execution",
        "procedure_id": procedure_id,
        "executor": id,
        "oracle_prev_state": false,
        "complete": true,
        "steps_completed": submissions.len(),
        "predictions": submissions,
        "summary": summary(&report),
        "report": report,
    });
    let mut store = s.store();
    store.add_report(record.clone())?;
    store.log_event("execution_finalized", json!({"session_id": id, "report_id": report_id}))?;
    Ok(Json(json!({
        "report": record,
        "target_board": procedure.final_board(),
        "gold_actions": procedure.gold_actions(),
    })))
}

// --- procedures and QA ------------------------------------------------

async fn list_procedures(State(s): State<AppState>) -> Json<Vec<Value>> {
    Json(
        s.store()
            .procedures
            .iter()
            .map(
                |p| json!({"id": p.id, "image_id": p.image_id, "steps": p.steps.len(), "qa_labels": p.qa_labels.len()}),
            )
            .collect(),
    )
}

async fn get_procedure(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    Ok(Json(procedure_json(&gold(&s, &id)?)))
}

#[derive(Deserialize)]
struct Fix {
    step: usize,
    category: QaCategory,
    actions: Option<ActionSet>,
}

/// Records a QA label, optionally with corrected actions for one step, and
/// checks that the corrected procedure still reproduces its image.
async fn fix_procedure(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<Fix>,
) -> ApiResult<Json<Value>> {
    let mut procedure = gold(&s, &id)?;
    let target = image_target(&s, &procedure.image_id).ok();
    procedure.qa_labels.push(QaLabel {
        step: req.step,
        category: req.category,
        corrected_actions: req.actions,
    });
    procedure
        .validate()
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_fix", e.to_string()))?;
    let corrected = procedure.gold_corrected();
    corrected
        .validate()
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_fix", e.to_string()))?;
    let matches_target = target.map(|t| t == corrected.final_board());
    let mut store = s.store();
    store.put_procedure(procedure.clone())?;
    store.log_event(
        "procedure_fixed",
        json!({"procedure_id": id, "step": req.step, "category": req.category}),
    )?;
    Ok(Json(json!({
        "procedure": procedure_json(&procedure),
        "matches_target": matches_target,
    })))
}

// --- machine rounds and reports ---------------------------------------

#[derive(Deserialize)]
struct MachineRound {
    procedure_id: String,
    endpoint: String,
    #[serde(default)]
    oracle_prev_state: bool,
    timeout_ms: Option<u64>,
}

fn round_record(report_id: &str, procedure_id: &str, endpoint: &str, oracle: bool, outcome: &RoundOutcome) -> Value {
    json!({
        "report_id": report_id,
        "kind": "machine",
        "procedure_id": procedure_id,
        "executor": endpoint,
        "oracle_prev_state": oracle,
        "complete": outcome.complete,
        "steps_completed": outcome.steps_completed,
        "predictions": outcome.predictions,
        "summary": outcome.report.as_ref().map(summary),
        "report": outcome.report,
        "partial_steps": outcome.partial_steps,
        "error": outcome.error,
    })
}

async fn machine_round(State(s): State<AppState>, Json(req): Json<MachineRound>) -> ApiResult<Json<Value>> {
    let endpoint: Endpoint = req.endpoint.parse().map_err(ApiError::bad_request)?;
    let procedure = gold(&s, &req.procedure_id)?;
    let report_id = s.next_id("report");
    let options = RoundOptions {
        oracle_prev_state: req.oracle_prev_state,
        timeout: req
            .timeout_ms
            .map(Duration::from_millis)
            .unwrap_or(s.config.executor_timeout),
        round_id: report_id.clone(),
    };
    let outcome = machine_executor_round(&procedure, &endpoint, &options).await;
    let record = round_record(
        &report_id,
        &procedure.id,
        &req.endpoint,
        req.oracle_prev_state,
        &outcome,
    );
    let mut store = s.store();
    store.add_report(record.clone())?;
    store.log_event(
        "machine_round",
        json!({"report_id": report_id, "procedure_id": procedure.id, "complete": outcome.complete}),
    )?;
    Ok(Json(record))
}

async fn list_reports(State(s): State<AppState>) -> Json<Vec<Value>> {
    Json(s.store().reports.clone())
}

async fn get_report(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    s.store()
        .reports
        .iter()
        .find(|r| r["report_id"] == id.as_str())
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::not_found("report", &id))
}
