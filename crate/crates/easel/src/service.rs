//! HTTP API over [`SessionService`].

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, Multipart, Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use easel_core::retelling::Condition;
use easel_core::ActivityType;
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

use crate::pipeline::PipelineError;
use crate::sessions::{SessionError, SessionService, Upload, UploadRole};
use crate::store::ArtifactKind;

pub const PARENT_HEADER: &str = "x-easel-parent";
const MAX_UPLOAD_BYTES: usize = 64 * 1024 * 1024;

#[derive(Clone)]
pub struct AppState {
    pub sessions: Arc<SessionService>,
    pub parent_secret: Option<String>,
}

pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        use SessionError::*;
        let (status, code) = match &e {
            UnknownEpisode(_) => (StatusCode::NOT_FOUND, "unknown_episode"),
            SessionNotFound(_) => (StatusCode::NOT_FOUND, "session_not_found"),
            ActivityNotSelected => (StatusCode::CONFLICT, "activity_not_selected"),
            NoActivityCondition => (StatusCode::CONFLICT, "no_activity_condition"),
            InvalidSelection(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_selection"),
            ArtifactAlreadyRecorded => (StatusCode::CONFLICT, "artifact_already_recorded"),
            ArtifactMissing => (StatusCode::CONFLICT, "artifact_missing"),
            ExplanationRequired => (StatusCode::CONFLICT, "explanation_required"),
            MediaMismatch { .. } => (StatusCode::UNSUPPORTED_MEDIA_TYPE, "media_mismatch"),
            EmptyBlob => (StatusCode::BAD_REQUEST, "empty_blob"),
            AlreadyCompleted => (StatusCode::CONFLICT, "already_completed"),
            SessionIncomplete => (StatusCode::CONFLICT, "session_incomplete"),
            Invalid(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            Pipeline(PipelineError::ProviderExhausted { .. } | PipelineError::EmptyGeneration { .. }) => {
                (StatusCode::BAD_GATEWAY, "provider_failed")
            }
            Pipeline(_) | Store(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        if status.is_server_error() {
            tracing::error!(error = %e, "request failed");
        }
        ApiError::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.code, "message": self.message}))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Runs blocking session work off the async executor.
async fn blocking<T, F>(state: &AppState, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&SessionService) -> Result<T, SessionError> + Send + 'static,
{
    let sessions = state.sessions.clone();
    tokio::task::spawn_blocking(move || f(&sessions))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map(Json)
        .map_err(ApiError::from)
}

pub fn router(state: AppState, videos_dir: PathBuf) -> Router {
    Router::new()
        .route("/api/episodes", get(list_episodes))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/activities", get(activities))
        .route("/api/sessions/{id}/selection", post(select))
        .route("/api/sessions/{id}/artifact", post(upload_artifact))
        .route("/api/sessions/{id}/complete", post(complete))
        .route("/api/parent/sessions/{id}", get(parent_view))
        .route("/api/parent/sessions/{id}/blobs/{name}", get(parent_blob))
        .nest_service("/videos", ServeDir::new(videos_dir))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

async fn list_episodes(State(state): State<AppState>) -> impl IntoResponse {
    blocking(&state, |s| s.episodes()).await
}

#[derive(Deserialize)]
struct CreateSession {
    child_id: String,
    episode_id: String,
    condition: Condition,
}

async fn create_session(State(state): State<AppState>, Json(body): Json<CreateSession>) -> Response {
    match blocking(&state, move |s| s.create_session(&body.child_id, &body.episode_id, body.condition)).await {
        Ok(record) => (StatusCode::CREATED, record).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> impl IntoResponse {
    blocking(&state, move |s| s.session(&id)).await
}

async fn activities(State(state): State<AppState>, Path(id): Path<String>) -> impl IntoResponse {
    blocking(&state, move |s| s.activities(&id)).await
}

#[derive(Deserialize)]
struct Selection {
    activity_type: ActivityType,
}

async fn select(State(state): State<AppState>, Path(id): Path<String>, Json(body): Json<Selection>) -> impl IntoResponse {
    blocking(&state, move |s| s.select_activity(&id, body.activity_type)).await
}

async fn complete(State(state): State<AppState>, Path(id): Path<String>) -> impl IntoResponse {
    blocking(&state, move |s| s.complete(&id)).await
}

/// Multipart fields: `kind` (drawing|audio|video|text), optional `role`
/// (artifact|explanation), optional `duration_seconds`, and `file` whose
/// part content type is the blob's media type.
async fn upload_artifact(
    State(state): State<AppState>,
    Path(id): Path<String>,
    mut multipart: Multipart,
) -> Result<Response, ApiError> {
    let (mut kind, mut role, mut duration, mut file) = (None, None, None, None);
    while let Some(field) = multipart.next_field().await.map_err(|e| ApiError::bad_request(e.to_string()))? {
        let name = field.name().unwrap_or_default().to_string();
        match name.as_str() {
            "file" => {
                let media = field.content_type().unwrap_or("application/octet-stream").to_string();
                let bytes = field.bytes().await.map_err(|e| ApiError::bad_request(e.to_string()))?;
                file = Some((media, bytes.to_vec()));
            }
            "kind" | "role" | "duration_seconds" => {
                let text = field.text().await.map_err(|e| ApiError::bad_request(e.to_string()))?;
                match name.as_str() {
                    "kind" => kind = Some(text.parse::<ArtifactKind>().map_err(ApiError::bad_request)?),
                    "role" => {
                        role = Some(match text.trim() {
                            "artifact" => UploadRole::Artifact,
                            "explanation" => UploadRole::Explanation,
                            other => return Err(ApiError::bad_request(format!("unknown role `{other}`"))),
                        })
                    }
                    _ => {
                        duration = Some(text.trim().parse::<f64>().map_err(|e| ApiError::bad_request(e.to_string()))?)
                    }
                }
            }
            _ => {}
        }
    }
    let kind = kind.ok_or_else(|| ApiError::bad_request("missing `kind` field"))?;
    let (media_type, bytes) = file.ok_or_else(|| ApiError::bad_request("missing `file` field"))?;
    let upload = Upload { kind, media_type, bytes, role, duration_seconds: duration };
    blocking(&state, move |s| s.record_artifact(&id, upload)).await.map(IntoResponse::into_response)
}

fn check_parent(state: &AppState, headers: &HeaderMap) -> Result<(), ApiError> {
    let Some(secret) = &state.parent_secret else {
        return Err(ApiError::new(StatusCode::FORBIDDEN, "parent_disabled", "parent access is not configured"));
    };
    match headers.get(PARENT_HEADER).and_then(|v| v.to_str().ok()) {
        Some(given) if given == secret => Ok(()),
        _ => Err(ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or wrong X-Easel-Parent header")),
    }
}

async fn parent_view(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> impl IntoResponse {
    check_parent(&state, &headers)?;
    blocking(&state, move |s| s.parent_view(&id)).await
}

/// Playback of a session's artifact or explanation recording.
async fn parent_blob(
    State(state): State<AppState>,
    Path((id, name)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    check_parent(&state, &headers)?;
    let found = blocking(&state, move |s| {
        let session = s.session(&id)?;
        let blob_path = format!("blobs/{id}/{name}");
        let artifact = session
            .artifact
            .into_iter()
            .chain(session.verbal_explanation)
            .find(|a| a.blob_path == blob_path)
            .ok_or_else(|| SessionError::Invalid(format!("no blob `{name}` in this session")))?;
        let bytes = s.store().read_blob(&artifact)?;
        Ok((artifact.media_type, bytes))
    })
    .await;
    match found {
        Ok(Json((media_type, bytes))) => Ok(([(header::CONTENT_TYPE, media_type)], bytes).into_response()),
        Err(e) if e.code == "bad_request" => Err(ApiError::new(StatusCode::NOT_FOUND, "blob_not_found", e.message)),
        Err(e) => Err(e),
    }
}

pub async fn serve(router: Router, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
