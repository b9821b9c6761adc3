use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use easel::service::{router, AppState, PARENT_HEADER};
use easel::sessions::SessionService;
use easel::store::{ArtifactKind, EpisodeRecord, Store};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub const SECRET: &str = "parent-secret";
const BOUNDARY: &str = "easel-test-boundary";

pub struct App {
    pub router: Router,
    pub sessions: Arc<SessionService>,
}

/// Service over a content root seeded with the Frog/Toad episode and backed
/// by the scripted provider.
pub fn app(root: &Path) -> App {
    let store = Arc::new(Store::open(root).unwrap());
    if store.get_episode("frog-toad-ice-cream").unwrap().is_none() {
        store.put_episode(&EpisodeRecord { transcript: super::transcript(), video: None }).unwrap();
    }
    let sessions = Arc::new(
        SessionService::new(
            store,
            super::taxonomy(),
            super::templates(),
            Arc::new(super::provider()),
            super::config(),
            vec![ArtifactKind::Drawing, ArtifactKind::Text],
        )
        .unwrap(),
    );
    let state = AppState { sessions: sessions.clone(), parent_secret: Some(SECRET.into()) };
    App { router: router(state, root.join("videos")), sessions }
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }
}

pub async fn send(router: &Router, request: Request<Body>) -> Reply {
    let response = router.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let body = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, body }
}

pub async fn get(router: &Router, uri: &str) -> Reply {
    send(router, Request::get(uri).body(Body::empty()).unwrap()).await
}

pub async fn get_parent(router: &Router, uri: &str, secret: &str) -> Reply {
    send(router, Request::get(uri).header(PARENT_HEADER, secret).body(Body::empty()).unwrap()).await
}

pub async fn post_json(router: &Router, uri: &str, body: Value) -> Reply {
    let request = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(router, request).await
}

/// Uploads one blob through the multipart artifact endpoint.
pub async fn upload(router: &Router, session: &str, kind: &str, role: Option<&str>, media_type: &str, bytes: &[u8]) -> Reply {
    let mut body = Vec::new();
    let mut text_part = |name: &str, value: &str| {
        body.extend_from_slice(
            format!("--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"{name}\"\r\n\r\n{value}\r\n").as_bytes(),
        );
    };
    text_part("kind", kind);
    if let Some(role) = role {
        text_part("role", role);
    }
    body.extend_from_slice(
        format!(
            "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"blob\"\r\nContent-Type: {media_type}\r\n\r\n"
        )
        .as_bytes(),
    );
    body.extend_from_slice(bytes);
    body.extend_from_slice(format!("\r\n--{BOUNDARY}--\r\n").as_bytes());
    let request = Request::post(format!("/api/sessions/{session}/artifact"))
        .header("content-type", format!("multipart/form-data; boundary={BOUNDARY}"))
        .body(Body::from(body))
        .unwrap();
    send(router, request).await
}
