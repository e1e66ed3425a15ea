//! HTTP routes over the session store.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::routing::{delete, get, post, put};
use axum::{Json, Router};
use serde::Deserialize;
use tokio::sync::RwLock;
use workbench_core::similarity::DEFAULT_NEIGHBORS;
use workbench_core::RankingWeights;

use crate::error::ApiError;
use crate::payloads::*;
use crate::session::{CreateSession, Session, Snapshot};

/// Sessions by id. Each session has its own lock: reads share it, and
/// mutations queue on it in arrival order.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<BTreeMap<String, Arc<RwLock<Session>>>>>,
}

impl AppState {
    pub async fn insert(&self, session: Session) -> String {
        let id = session.id.clone();
        self.sessions.write().await.insert(id.clone(), Arc::new(RwLock::new(session)));
        id
    }

    async fn get(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("unknown session {id:?}")))
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(|e| {
        let status = e.status();
        let code = if status.as_u16() == 422 { "invalid_body" } else { "bad_request" };
        ApiError::new(status, code, e.body_text())
    })
}

fn new_session_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

/// Builds a session off the async runtime; creation runs the backtest.
pub async fn build_session(build: impl FnOnce(String) -> Result<Session, ApiError> + Send + 'static) -> Result<Session, ApiError> {
    let id = new_session_id();
    tokio::task::spawn_blocking(move || build(id))
        .await
        .map_err(|e| ApiError::internal(format!("session worker failed: {e}")))?
}

async fn create_session(
    State(state): State<AppState>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<SessionCreated> {
    let request = body(payload)?;
    let session = build_session(move |id| Session::create(id, request)).await?;
    let created = session.created();
    tracing::info!(session = %created.session_id, products = created.product_count, "session created");
    state.insert(session).await;
    Ok(Json(created))
}

async fn restore_session(
    State(state): State<AppState>,
    payload: Result<Json<Snapshot>, JsonRejection>,
) -> ApiResult<SessionCreated> {
    let snapshot = body(payload)?;
    let session = build_session(move |id| Session::restore(id, snapshot)).await?;
    let created = session.created();
    state.insert(session).await;
    Ok(Json(created))
}

async fn projection(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<ProjectionPayload> {
    let session = state.get(&id).await?;
    let s = session.read().await;
    Ok(Json(s.projection()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterRequest {
    product_ids: Vec<String>,
}

async fn set_cluster(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<ClusterRequest>, JsonRejection>,
) -> ApiResult<ClusterPayload> {
    let request = body(payload)?;
    let session = state.get(&id).await?;
    let mut s = session.write().await;
    Ok(Json(s.set_cluster(request.product_ids)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsRequest {
    w_accuracy: f64,
    w_variance: f64,
    w_applicability: f64,
    #[serde(default)]
    top_k: Option<usize>,
}

async fn set_weights(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<WeightsRequest>, JsonRejection>,
) -> ApiResult<RankingPayload> {
    let r = body(payload)?;
    let session = state.get(&id).await?;
    let mut s = session.write().await;
    let weights = RankingWeights::new(r.w_accuracy, r.w_variance, r.w_applicability);
    Ok(Json(s.set_weights(weights, r.top_k)?))
}

async fn models(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<ModelsPayload> {
    let session = state.get(&id).await?;
    let s = session.read().await;
    Ok(Json(s.models()?))
}

async fn ranking(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<ClusterPayload> {
    let session = state.get(&id).await?;
    let s = session.read().await;
    Ok(Json(s.cluster_payload()?))
}

async fn snapshot(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Snapshot> {
    let session = state.get(&id).await?;
    let s = session.read().await;
    Ok(Json(s.snapshot()))
}

async fn product_detail(
    State(state): State<AppState>,
    Path((id, pid)): Path<(String, String)>,
) -> ApiResult<ProductDetail> {
    let session = state.get(&id).await?;
    let s = session.read().await;
    Ok(Json(s.product_detail(&pid)?))
}

#[derive(Debug, Deserialize)]
struct NeighborQuery {
    n: Option<usize>,
}

fn neighbors(query: Result<Query<NeighborQuery>, QueryRejection>) -> Result<usize, ApiError> {
    let Query(q) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    Ok(q.n.unwrap_or(DEFAULT_NEIGHBORS))
}

async fn risk(
    State(state): State<AppState>,
    Path((id, pid)): Path<(String, String)>,
    query: Result<Query<NeighborQuery>, QueryRejection>,
) -> ApiResult<RiskPayload> {
    let n = neighbors(query)?;
    let session = state.get(&id).await?;
    let s = session.read().await;
    Ok(Json(s.risk_view(&pid, n)?))
}

async fn remove_similar(
    State(state): State<AppState>,
    Path((id, pid, rid)): Path<(String, String, String)>,
    query: Result<Query<NeighborQuery>, QueryRejection>,
) -> ApiResult<RiskPayload> {
    let n = neighbors(query)?;
    let session = state.get(&id).await?;
    let mut s = session.write().await;
    Ok(Json(s.remove_similar(&pid, &rid, n)?))
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such route")
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/restore", post(restore_session))
        .route("/sessions/{id}/projection", get(projection))
        .route("/sessions/{id}/cluster", put(set_cluster).get(ranking))
        .route("/sessions/{id}/weights", put(set_weights))
        .route("/sessions/{id}/models", get(models))
        .route("/sessions/{id}/snapshot", get(snapshot))
        .route("/sessions/{id}/products/{pid}", get(product_detail))
        .route("/sessions/{id}/products/{pid}/risk", get(risk))
        .route("/sessions/{id}/products/{pid}/similar/{rid}", delete(remove_similar))
        .fallback(fallback)
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
