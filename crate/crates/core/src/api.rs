//! HTTP JSON API. Handlers only translate between the wire and the
//! [`Database`]; every error maps to one documented (status, code) pair.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::db::Database;
use crate::error::{Error, FieldError};
use crate::index::Query;
use crate::model::{IncidentNumber, Resolution, Submission, SubmissionId, SubmissionState};
use crate::submission::DraftInput;
use crate::views::ViewStore;

/// Environment variable holding the shared secret for review endpoints.
pub const REVIEW_SECRET_ENV: &str = "INCIDENTDB_REVIEW_SECRET";
/// Request header carrying the review secret.
pub const REVIEW_SECRET_HEADER: &str = "x-review-secret";

/// Status and code for every module error.
pub fn status_of(err: &Error) -> StatusCode {
    match err {
        Error::InvalidQuery(_) => StatusCode::BAD_REQUEST,
        Error::UnknownReport(_)
        | Error::UnknownIncident(_)
        | Error::UnknownNamespace(_)
        | Error::UnknownTag { .. }
        | Error::UnknownClassification { .. }
        | Error::UnknownSubmission(_)
        | Error::UnknownView(_) => StatusCode::NOT_FOUND,
        Error::DuplicateReport(_)
        | Error::DuplicateUrl(_)
        | Error::WouldOrphanIncident { .. }
        | Error::DuplicateNamespace(_)
        | Error::DuplicateClassification { .. }
        | Error::AlreadyDecided(_) => StatusCode::CONFLICT,
        Error::InvalidName { .. } | Error::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
        Error::CorruptLog { .. } | Error::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

/// Error body: `{"httpStatus", "code", "message", "fieldErrors"?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiError {
    pub http_status: u16,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_errors: Option<Vec<ApiFieldError>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiFieldError {
    pub field: String,
    pub message: String,
}

impl From<&FieldError> for ApiFieldError {
    fn from(e: &FieldError) -> Self {
        ApiFieldError {
            field: e.field.clone(),
            message: e.message.clone(),
        }
    }
}

impl ApiError {
    fn unauthorized() -> Self {
        ApiError {
            http_status: StatusCode::UNAUTHORIZED.as_u16(),
            code: "Unauthorized".into(),
            message: format!("missing or wrong {REVIEW_SECRET_HEADER} header"),
            field_errors: None,
        }
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        ApiError {
            http_status: status_of(&err).as_u16(),
            code: err.code().into(),
            message: err.to_string(),
            field_errors: err
                .field_errors()
                .map(|fe| fe.iter().map(ApiFieldError::from).collect()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Clone)]
pub struct AppState {
    pub db: Arc<Database>,
    pub views: ViewStore,
    pub review_secret: Option<String>,
}

impl AppState {
    /// Views are served from `<data_dir>/views`; the review secret is read
    /// from the environment.
    pub fn new(db: Arc<Database>, data_dir: impl Into<PathBuf>) -> Self {
        AppState {
            db,
            views: ViewStore::new(data_dir),
            review_secret: std::env::var(REVIEW_SECRET_ENV).ok().filter(|s| !s.is_empty()),
        }
    }

    fn authorize(&self, headers: &HeaderMap) -> ApiResult<()> {
        let Some(secret) = &self.review_secret else {
            return Ok(());
        };
        match headers.get(REVIEW_SECRET_HEADER) {
            Some(v) if v.as_bytes() == secret.as_bytes() => Ok(()),
            _ => Err(ApiError::unauthorized()),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/search", get(search))
        .route("/api/incidents/{n}", get(incident))
        .route("/api/submissions", post(submit))
        .route("/api/submissions/pending", get(pending))
        .route("/api/submissions/{id}", get(submission))
        .route("/api/submissions/{id}/decision", post(decide))
        .route("/api/views/{name}", get(view))
        .with_state(state)
}

/// API routes plus static hosting of the UI bundle at `/`.
pub fn app(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = router(state);
    match ui_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(state: AppState, addr: SocketAddr, ui_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app(state, ui_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn bad_query(msg: impl Into<String>) -> ApiError {
    Error::InvalidQuery(msg.into()).into()
}

fn parse_number<T: std::str::FromStr>(name: &str, raw: &str) -> ApiResult<T> {
    raw.parse()
        .map_err(|_| bad_query(format!("{name} must be a positive integer, got {raw:?}")))
}

/// Builds a [`Query`] from `q`, repeated `f=<key>:<value>`, `page` and
/// `pageSize`.
pub fn parse_search_params(raw: &str) -> ApiResult<Query> {
    let mut query = Query::default();
    for (key, value) in url::form_urlencoded::parse(raw.as_bytes()) {
        match key.as_ref() {
            "q" => query.text = value.into_owned(),
            "f" => query = query.filter_spec(&value)?,
            "page" => query.page = parse_number("page", &value)?,
            "pageSize" => query.page_size = parse_number("pageSize", &value)?,
            _ => {}
        }
    }
    query.validate()?;
    Ok(query)
}

async fn search(State(st): State<AppState>, RawQuery(raw): RawQuery) -> ApiResult<Response> {
    let start = Instant::now();
    let query = parse_search_params(raw.as_deref().unwrap_or(""))?;
    let mut result = st.db.search(&query)?;
    result.elapsed_micros = start.elapsed().as_micros() as u64;
    Ok(Json(result).into_response())
}

async fn incident(State(st): State<AppState>, Path(n): Path<String>) -> ApiResult<Response> {
    let n: u32 = parse_number("incident number", &n)?;
    Ok(Json(st.db.incident_document(IncidentNumber(n))?).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SubmitBody {
    #[serde(flatten)]
    draft: DraftInput,
    #[serde(default)]
    submitter: String,
}

fn json_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| Error::validation("body", &e.to_string()).into())
}

async fn submit(State(st): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let body: SubmitBody = json_body(&body)?;
    let submission = st.db.submit(body.draft, &body.submitter)?;
    Ok((StatusCode::CREATED, Json(submission)).into_response())
}

#[derive(Debug, Deserialize)]
struct PageParams {
    page: Option<String>,
}

async fn pending(
    State(st): State<AppState>,
    headers: HeaderMap,
    axum::extract::Query(p): axum::extract::Query<PageParams>,
) -> ApiResult<Response> {
    st.authorize(&headers)?;
    let page = match p.page {
        Some(raw) => parse_number::<usize>("page", &raw)?,
        None => 1,
    };
    if page == 0 {
        return Err(bad_query("page must be at least 1"));
    }
    Ok(Json(st.db.pending_queue(page)).into_response())
}

async fn submission(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let id: u64 = parse_number("submission id", &id)?;
    Ok(Json(st.db.submission(SubmissionId(id))?).into_response())
}

/// `{"decision": "accept", "resolution": "new" | <n>, "reviewer"}` or
/// `{"decision": "reject", "reason", "reviewer"}`.
#[derive(Debug, Deserialize)]
struct DecisionBody {
    decision: String,
    #[serde(default)]
    resolution: Option<Value>,
    #[serde(default)]
    reason: Option<String>,
    #[serde(default)]
    reviewer: Option<String>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct Decided {
    submission: Submission,
    #[serde(skip_serializing_if = "Option::is_none")]
    incident_number: Option<IncidentNumber>,
}

fn parse_resolution(value: Option<Value>) -> ApiResult<Resolution> {
    let parsed = match value {
        Some(Value::String(s)) => s.parse::<Resolution>(),
        Some(Value::Number(n)) => n.to_string().parse::<Resolution>(),
        _ => Err("required".to_string()),
    };
    parsed.map_err(|msg| Error::validation("resolution", &msg).into())
}

async fn decide(
    State(st): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    st.authorize(&headers)?;
    let id = SubmissionId(parse_number("submission id", &id)?);
    let body: DecisionBody = json_body(&body)?;
    let reviewer = body.reviewer.unwrap_or_else(|| "reviewer".into());
    let decided = match body.decision.as_str() {
        "accept" => {
            let resolution = parse_resolution(body.resolution)?;
            let report = st.db.accept(id, resolution, &reviewer)?;
            Decided {
                submission: st.db.submission(id)?,
                incident_number: Some(report.incident_number),
            }
        }
        "reject" => {
            let submission = st.db.reject(id, body.reason.as_deref().unwrap_or(""), &reviewer)?;
            debug_assert_eq!(submission.state, SubmissionState::Rejected);
            Decided {
                submission,
                incident_number: None,
            }
        }
        other => {
            return Err(Error::validation("decision", &format!("expected accept or reject, got {other:?}")).into())
        }
    };
    Ok(Json(decided).into_response())
}

async fn view(State(st): State<AppState>, Path(name): Path<String>, headers: HeaderMap) -> ApiResult<Response> {
    let artifact = st.views.get(&name)?;
    let etag = HeaderValue::from_str(&artifact.etag).expect("etag is ascii");
    let fresh = headers
        .get(header::IF_NONE_MATCH)
        .is_some_and(|v| v.as_bytes() == artifact.etag.as_bytes());
    let mut response = if fresh {
        StatusCode::NOT_MODIFIED.into_response()
    } else {
        (
            [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
            artifact.bytes,
        )
            .into_response()
    };
    let h = response.headers_mut();
    h.insert(header::ETAG, etag);
    h.insert(header::CACHE_CONTROL, HeaderValue::from_static("no-cache"));
    Ok(response)
}
