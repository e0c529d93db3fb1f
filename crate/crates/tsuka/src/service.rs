//! JSON-over-HTTP API under `/api/v1`.
//!
//! Assessments read an immutable config snapshot. Config replacement and
//! applicant mutations go through single-writer gates, and every 2xx mutation
//! is on disk before the response is sent.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{Map, Value};
use tokio::sync::{Mutex, RwLock as AsyncRwLock};
use tsuka_core::loan::{assess, what_if, Applicant, FieldError, FisConfig, LoanError};
use tsuka_core::Error as EngineError;

use crate::store::{save_config, ApplicantStore, ConfigDocument, StoreError};

/// Largest accepted `steps` for `/whatif`.
pub const MAX_SWEEP_STEPS: usize = 1001;

/// Every `code` the API can return.
pub const ERROR_CODES: [&str; 8] = [
    "validation_failed",
    "no_rule_fired",
    "malformed_json",
    "not_found",
    "method_not_allowed",
    "conflict",
    "payload_too_large",
    "storage_error",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_errors: Option<Vec<FieldError>>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        debug_assert!(ERROR_CODES.contains(&code));
        ApiError { status, code, detail: detail.into(), field_errors: None }
    }

    fn validation(detail: impl Into<String>, fields: Vec<FieldError>) -> Self {
        ApiError { field_errors: Some(fields), ..Self::new(StatusCode::UNPROCESSABLE_ENTITY, "validation_failed", detail) }
    }

    fn not_found(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", detail)
    }

    fn storage(e: StoreError) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<LoanError> for ApiError {
    fn from(e: LoanError) -> Self {
        match e {
            LoanError::Invalid(fields) => ApiError::validation("invalid applicant", fields),
            LoanError::UnknownVariable(name) => ApiError::validation(
                format!("`{name}` is not an input variable"),
                vec![FieldError::new("vary", "unknown input variable")],
            ),
            LoanError::Inference(e @ EngineError::NoRuleFired { .. }) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "no_rule_fired", e.to_string())
            }
            LoanError::Inference(e) => ApiError::validation(e.to_string(), Vec::new()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Shared service state.
pub struct AppState {
    config: RwLock<Arc<FisConfig>>,
    config_path: Option<PathBuf>,
    config_gate: Mutex<()>,
    store: AsyncRwLock<ApplicantStore>,
}

impl AppState {
    /// `config_path`, when set, receives every accepted config replacement.
    pub fn new(config: FisConfig, store: ApplicantStore, config_path: Option<PathBuf>) -> Arc<Self> {
        Arc::new(AppState {
            config: RwLock::new(Arc::new(config)),
            config_path,
            config_gate: Mutex::new(()),
            store: AsyncRwLock::new(store),
        })
    }

    /// The config new requests will see.
    pub fn config(&self) -> Arc<FisConfig> {
        self.config.read().expect("config lock poisoned").clone()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    router_with_assets(state, None)
}

/// The API router, optionally serving static files from `assets` under `/`.
pub fn router_with_assets(state: Arc<AppState>, assets: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/assess", post(assess_handler))
        .route("/whatif", post(whatif_handler))
        .route("/config", get(get_config).put(put_config))
        .route("/applicants", get(list_applicants).post(create_applicant))
        .route("/applicants/{id}", get(get_applicant).put(update_applicant).delete(delete_applicant))
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed);
    let app = Router::new().nest("/api/v1", api);
    let app = match assets {
        Some(dir) => app.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => app.fallback(not_found),
    };
    app.with_state(state)
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>, assets: Option<&Path>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router_with_assets(state, assets))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn not_found() -> ApiError {
    ApiError::not_found("no such route")
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed", "method not allowed for this route")
}

fn parse_object(body: &Bytes) -> ApiResult<Map<String, Value>> {
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(ApiError::new(StatusCode::BAD_REQUEST, "malformed_json", "body must be a JSON object")),
        Err(e) => Err(ApiError::new(StatusCode::BAD_REQUEST, "malformed_json", e.to_string())),
    }
}

const APPLICANT_FIELDS: [&str; 5] = ["id", "name", "income", "loan_amount", "collateral_value"];

/// Reads applicant fields from a JSON object. `extra` names other fields the
/// endpoint accepts; anything else is a validation error.
fn applicant_from(obj: &Map<String, Value>, extra: &[&str], id: Option<String>) -> ApiResult<Applicant> {
    let mut errors = Vec::new();
    for key in obj.keys() {
        if !APPLICANT_FIELDS.contains(&key.as_str()) && !extra.contains(&key.as_str()) {
            errors.push(FieldError::new(key.clone(), "unknown field"));
        }
    }
    let mut text = |key: &str| match obj.get(key) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            errors.push(FieldError::new(key, "must be a string"));
            None
        }
    };
    let given_id = text("id");
    let name = text("name").unwrap_or_default();
    let mut number = |key: &str| match obj.get(key) {
        Some(Value::Number(n)) => n.as_f64(),
        None | Some(Value::Null) => {
            errors.push(FieldError::new(key, "is required"));
            None
        }
        Some(_) => {
            errors.push(FieldError::new(key, "must be a number"));
            None
        }
    };
    let income = number("income");
    let loan_amount = number("loan_amount");
    let collateral_value = number("collateral_value");
    if !errors.is_empty() {
        return Err(ApiError::validation("invalid applicant", errors));
    }
    let (income, loan_amount, collateral_value) = (income.unwrap(), loan_amount.unwrap(), collateral_value.unwrap());
    let id = match (id, given_id) {
        (Some(path_id), Some(body_id)) if path_id != body_id => {
            return Err(ApiError::validation(
                "body id does not match the URL",
                vec![FieldError::new("id", "must match the URL id")],
            ));
        }
        (Some(id), _) | (None, Some(id)) => id,
        (None, None) => derived_id(income, loan_amount, collateral_value),
    };
    let a = Applicant { id, name, income, loan_amount, collateral_value };
    a.validate().map_err(|fields| ApiError::validation("invalid applicant", fields))?;
    Ok(a)
}

// Ids for anonymous requests are a function of the inputs, so identical
// requests produce identical responses.
fn derived_id(income: f64, loan: f64, collateral: f64) -> String {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    (income.to_bits(), loan.to_bits(), collateral.to_bits()).hash(&mut h);
    format!("anon-{:016x}", h.finish())
}

async fn assess_handler(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let obj = parse_object(&body)?;
    let a = applicant_from(&obj, &[], None)?;
    let cfg = state.config();
    let result = assess(&a, &cfg)?;
    Ok(Json(result).into_response())
}

async fn whatif_handler(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let obj = parse_object(&body)?;
    let mut errors = Vec::new();
    let vary = match obj.get("vary") {
        Some(Value::String(s)) => Some(s.clone()),
        _ => {
            errors.push(FieldError::new("vary", "is required and must be a string"));
            None
        }
    };
    let steps = match obj.get("steps").map(Value::as_u64) {
        Some(Some(n)) => Some(n),
        _ => {
            errors.push(FieldError::new("steps", "is required and must be a non-negative integer"));
            None
        }
    };
    if !errors.is_empty() {
        return Err(ApiError::validation("invalid sweep request", errors));
    }
    let (vary, steps) = (vary.unwrap(), steps.unwrap());
    if steps > MAX_SWEEP_STEPS as u64 {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "payload_too_large",
            format!("steps is capped at {MAX_SWEEP_STEPS}"),
        ));
    }
    let a = applicant_from(&obj, &["vary", "steps"], None)?;
    let cfg = state.config();
    let points = what_if(&a, &cfg, &vary, steps as usize)?;
    Ok(Json(points).into_response())
}

async fn get_config(State(state): State<Arc<AppState>>) -> Json<ConfigDocument> {
    Json(ConfigDocument::from(state.config().as_ref()))
}

fn store_error_to_api(e: StoreError) -> ApiError {
    match e {
        StoreError::Schema { field, message } => {
            ApiError::validation(format!("{field}: {message}"), vec![FieldError::new(field, message)])
        }
        StoreError::Rules { errors, .. } => ApiError::validation(
            "invalid rules",
            errors
                .iter()
                .map(|e| FieldError::new(format!("rules[{}]", e.span.line - 1), format!("column {}: {}", e.span.column, e.message)))
                .collect(),
        ),
        other => ApiError::storage(other),
    }
}

async fn put_config(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<ConfigDocument>> {
    let text = std::str::from_utf8(&body)
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "malformed_json", "body is not UTF-8"))?;
    let doc = ConfigDocument::from_json(text).map_err(store_error_to_api)?;
    let cfg = doc.to_config().map_err(store_error_to_api)?;

    let _gate = state.config_gate.lock().await;
    if let Some(path) = &state.config_path {
        save_config(&cfg, path).map_err(ApiError::storage)?;
    }
    let response = ConfigDocument::from(&cfg);
    *state.config.write().expect("config lock poisoned") = Arc::new(cfg);
    Ok(Json(response))
}

async fn list_applicants(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<Vec<Applicant>>> {
    let limit = match params.get("limit") {
        Some(raw) => raw.parse::<usize>().map_err(|_| {
            ApiError::validation("invalid limit", vec![FieldError::new("limit", "must be a non-negative integer")])
        })?,
        None => usize::MAX,
    };
    let store = state.store.read().await;
    Ok(Json(store.iter().take(limit).cloned().collect()))
}

async fn get_applicant(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Applicant>> {
    let store = state.store.read().await;
    store.get(&id).cloned().map(Json).ok_or_else(|| ApiError::not_found(format!("no applicant `{id}`")))
}

async fn create_applicant(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let obj = parse_object(&body)?;
    let mut store = state.store.write().await;
    let id = match obj.get("id") {
        Some(Value::String(_)) => None,
        _ => Some(next_free_id(&store)),
    };
    let a = applicant_from(&obj, &[], id)?;
    if !store.insert(a.clone()).map_err(ApiError::storage)? {
        return Err(ApiError::new(StatusCode::CONFLICT, "conflict", format!("applicant `{}` already exists", a.id)));
    }
    Ok((StatusCode::CREATED, Json(a)).into_response())
}

fn next_free_id(store: &ApplicantStore) -> String {
    let mut n = store.len() as u64 + 1;
    loop {
        let id = format!("applicant-{n}");
        if !store.contains(&id) {
            return id;
        }
        n += 1;
    }
}

async fn update_applicant(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<Json<Applicant>> {
    let obj = parse_object(&body)?;
    let a = applicant_from(&obj, &[], Some(id.clone()))?;
    let mut store = state.store.write().await;
    if !store.update(a.clone()).map_err(ApiError::storage)? {
        return Err(ApiError::not_found(format!("no applicant `{id}`")));
    }
    Ok(Json(a))
}

async fn delete_applicant(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<StatusCode> {
    let mut store = state.store.write().await;
    if !store.remove(&id).map_err(ApiError::storage)? {
        return Err(ApiError::not_found(format!("no applicant `{id}`")));
    }
    Ok(StatusCode::NO_CONTENT)
}
