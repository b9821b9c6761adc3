mod common;

use axum::http::StatusCode;
use easel::store::{write_atomic, Store};
use serde_json::{json, Value};

use common::http::*;

const PNG: &[u8] = b"\x89PNG\r\n\x1a\nfake drawing";
const WEBM: &[u8] = b"\x1aE\xdf\xa3fake audio";

async fn create(app: &App, condition: &str) -> String {
    let r = post_json(
        &app.router,
        "/api/sessions",
        json!({"child_id": "child-07", "episode_id": "frog-toad-ice-cream", "condition": condition}),
    )
    .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&r.body));
    let v = r.json();
    assert!(v["completed_at"].is_null());
    v["session_id"].as_str().unwrap().to_string()
}

async fn select(app: &App, id: &str, activity: &str) -> Value {
    let r = post_json(&app.router, &format!("/api/sessions/{id}/selection"), json!({"activity_type": activity})).await;
    assert_eq!(r.status, StatusCode::OK, "{}", String::from_utf8_lossy(&r.body));
    r.json()
}

#[tokio::test]
async fn drawing_lifecycle_reaches_the_parent_view() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());

    let episodes = get(&app.router, "/api/episodes").await.json();
    assert_eq!(episodes[0]["episode_id"], "frog-toad-ice-cream");

    let id = create(&app, "easel_activity").await;
    let r = get_parent(&app.router, &format!("/api/parent/sessions/{id}"), SECRET).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["error"], "session_incomplete");

    let activities = get(&app.router, &format!("/api/sessions/{id}/activities")).await.json();
    let types: Vec<&str> = activities.as_array().unwrap().iter().map(|a| a["activity_type"].as_str().unwrap()).collect();
    assert_eq!(types, ["drawing", "change_story", "personal_story", "role_play"]);

    let session = select(&app, &id, "drawing").await;
    assert_eq!(session["selected_activity"]["activity_type"], "drawing");

    let r = upload(&app.router, &id, "drawing", None, "image/png", PNG).await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(r.json()["completed_at"].is_null(), "a drawing still needs its explanation");
    let r = post_json(&app.router, &format!("/api/sessions/{id}/complete"), json!({})).await;
    assert_eq!(r.json()["error"], "explanation_required");

    let r = upload(&app.router, &id, "audio", None, "audio/webm", WEBM).await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(!r.json()["completed_at"].is_null());

    let uri = format!("/api/parent/sessions/{id}");
    let first = get_parent(&app.router, &uri, SECRET).await;
    assert_eq!(first.status, StatusCode::OK);
    let view = first.json();
    assert!(!view["summary"]["summary_text"].as_str().unwrap().is_empty());
    assert!(view["skill"]["description"].is_string());
    assert_eq!(view["artifact"]["artifact"]["kind"], "drawing");
    assert_eq!(view["artifact"]["verbal_explanation"]["kind"], "audio");
    assert!(view["artifact"]["activity_prompt"].as_str().unwrap().starts_with("In the video you just watched"));
    assert_eq!(
        view["conversation_starter"]["prompt_text"],
        "Before bed, tell your child a story about a time where someone took something that belonged to you."
    );
    let again = get_parent(&app.router, &uri, SECRET).await;
    assert_eq!(first.body, again.body, "parent view is a pure projection");

    let blob = view["artifact"]["artifact"]["blob_path"].as_str().unwrap().rsplit('/').next().unwrap().to_string();
    let r = get_parent(&app.router, &format!("/api/parent/sessions/{id}/blobs/{blob}"), SECRET).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body, PNG);

    assert!(app.sessions.store().scan().unwrap().is_clean());
}

#[tokio::test]
async fn audio_activity_needs_no_explanation() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app, "easel_activity").await;
    select(&app, &id, "personal_story").await;
    let r = upload(&app.router, &id, "audio", None, "audio/webm", WEBM).await;
    assert!(!r.json()["completed_at"].is_null());
    let r = upload(&app.router, &id, "audio", None, "audio/webm", WEBM).await;
    assert_eq!(r.json()["error"], "already_completed");
}

#[tokio::test]
async fn no_activity_session_has_summary_only() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app, "no_activity").await;
    let r = upload(&app.router, &id, "drawing", None, "image/png", PNG).await;
    assert_eq!(r.json()["error"], "activity_not_selected");
    let r = get(&app.router, &format!("/api/sessions/{id}/activities")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    let r = post_json(&app.router, &format!("/api/sessions/{id}/complete"), json!({})).await;
    assert_eq!(r.status, StatusCode::OK);
    let view = get_parent(&app.router, &format!("/api/parent/sessions/{id}"), SECRET).await.json();
    assert!(view["summary"]["summary_text"].as_str().unwrap().starts_with("Frog steals"));
    assert!(view["artifact"].is_null());
    assert!(view["conversation_starter"].is_null());
    assert!(view["skill"].is_null());
}

#[tokio::test]
async fn request_errors_map_to_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let r = post_json(&app.router, "/api/sessions", json!({"child_id": "c", "episode_id": "nope", "condition": "easel_activity"})).await;
    assert_eq!((r.status, r.json()["error"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_episode")));
    let r = get(&app.router, "/api/sessions/missing").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);

    let a = create(&app, "easel_activity").await;
    let b = create(&app, "easel_activity").await;
    assert_ne!(a, b);

    let r = upload(&app.router, &a, "drawing", None, "image/png", PNG).await;
    assert_eq!(r.json()["error"], "activity_not_selected");
    select(&app, &a, "drawing").await;
    let r = upload(&app.router, &a, "drawing", None, "audio/webm", WEBM).await;
    assert_eq!(r.status, StatusCode::UNSUPPORTED_MEDIA_TYPE);
    let r = upload(&app.router, &a, "audio", Some("explanation"), "audio/webm", WEBM).await;
    assert_eq!(r.json()["error"], "artifact_missing");
    let r = upload(&app.router, &a, "drawing", None, "image/png", b"").await;
    assert_eq!(r.json()["error"], "empty_blob");

    let uri = format!("/api/parent/sessions/{a}");
    assert_eq!(get(&app.router, &uri).await.status, StatusCode::UNAUTHORIZED);
    assert_eq!(get_parent(&app.router, &uri, "wrong").await.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn sessions_get_their_own_seed() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let a = create(&app, "easel_activity").await;
    let b = create(&app, "easel_activity").await;
    let seed = |id: &str| app.sessions.session(id).unwrap().seed;
    assert_ne!(seed(&a), seed(&b));
    assert_eq!(seed(&a), easel::sessions::session_seed(4, &a));
}

#[test]
fn recovery_removes_interrupted_writes() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let runtime = tokio::runtime::Runtime::new().unwrap();
    let id = runtime.block_on(async {
        let app = app(root);
        let id = create(&app, "easel_activity").await;
        select(&app, &id, "drawing").await;
        upload(&app.router, &id, "drawing", None, "image/png", PNG).await;
        id
    });

    // A crash mid-write leaves a temp file beside the record, and a blob
    // written before its session update landed.
    std::fs::write(root.join("sessions").join(format!(".tmp-{id}")), b"{\"session_id\": \"trunc").unwrap();
    std::fs::write(root.join("blobs").join(&id).join("orphan.png"), PNG).unwrap();
    let session_path = root.join("sessions").join(format!("{id}.json"));
    let before = std::fs::read(&session_path).unwrap();

    let store = Store::open(root).unwrap();
    let report = store.scan().unwrap();
    assert!(report.is_clean(), "{report:?}");
    assert_eq!(std::fs::read(&session_path).unwrap(), before);
    assert!(store.get_session(&id).unwrap().unwrap().artifact.is_some());

    // An atomic overwrite leaves either the old or the new document.
    let mut record = store.get_session(&id).unwrap().unwrap();
    record.child_id = "renamed".into();
    write_atomic(&session_path, &serde_json::to_vec(&record).unwrap()).unwrap();
    assert_eq!(store.get_session(&id).unwrap().unwrap().child_id, "renamed");
    assert!(store.scan().unwrap().is_clean());
}

#[test]
fn torn_records_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    std::fs::write(dir.path().join("sessions").join("broken.json"), b"{\"session_id\":").unwrap();
    assert_eq!(store.scan().unwrap().torn_records, ["sessions/broken.json"]);
}

#[tokio::test]
async fn concurrent_uploads_to_one_session_are_serialized() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app, "easel_activity").await;
    select(&app, &id, "role_play").await;
    let mut handles = Vec::new();
    for _ in 0..6 {
        let (router, id) = (app.router.clone(), id.clone());
        handles.push(tokio::spawn(async move { upload(&router, &id, "video", Some("artifact"), "video/mp4", b"frames").await.status }));
    }
    let mut ok = 0;
    for h in handles {
        if h.await.unwrap() == StatusCode::OK {
            ok += 1;
        }
    }
    assert_eq!(ok, 1);
    let report = app.sessions.store().scan().unwrap();
    assert!(report.dangling_refs.is_empty() && report.torn_records.is_empty(), "{report:?}");
}
