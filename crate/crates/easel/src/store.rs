//! File-backed persistence: one JSON document per record under a content
//! root, plus a `blobs/` tree for child artifacts.
//!
//! ```text
//! <root>/episodes/<episode_id>.json
//! <root>/sessions/<session_id>.json
//! <root>/outputs/<session_id>.json      pipeline output of an activity session
//! <root>/summaries/<session_id>.json    summary of a no-activity session
//! <root>/blobs/<session_id>/<uuid>.<ext>
//! ```
//!
//! Every write goes to a temporary file in the target directory and is then
//! renamed over the destination, so a reader sees the old or the new
//! document and never a partial one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use easel_core::retelling::Condition;
use easel_core::{ActivityType, ChildActivity, EpisodeSummary, Transcript};
use parking_lot::Mutex;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::pipeline::PipelineOutput;

const TEMP_PREFIX: &str = ".tmp-";
const DIRS: [&str; 5] = ["episodes", "sessions", "outputs", "summaries", "blobs"];

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed record: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("invalid record id `{0}`")]
    InvalidId(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Drawing,
    Audio,
    Video,
    Text,
}

impl ArtifactKind {
    pub const ALL: [ArtifactKind; 4] = [ArtifactKind::Drawing, ArtifactKind::Audio, ArtifactKind::Video, ArtifactKind::Text];

    pub fn as_str(self) -> &'static str {
        match self {
            ArtifactKind::Drawing => "drawing",
            ArtifactKind::Audio => "audio",
            ArtifactKind::Video => "video",
            ArtifactKind::Text => "text",
        }
    }

    /// Whether `media_type` is a plausible encoding for this kind.
    pub fn accepts(self, media_type: &str) -> bool {
        let top = media_type.split('/').next().unwrap_or("").trim().to_ascii_lowercase();
        match self {
            ArtifactKind::Drawing => top == "image",
            ArtifactKind::Audio => top == "audio",
            ArtifactKind::Video => top == "video",
            ArtifactKind::Text => top == "text",
        }
    }
}

impl fmt::Display for ArtifactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArtifactKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArtifactKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown artifact kind `{s}`"))
    }
}

fn extension_for(media_type: &str) -> &'static str {
    match media_type.split(';').next().unwrap_or("").trim() {
        "image/png" => "png",
        "image/jpeg" => "jpg",
        "image/svg+xml" => "svg",
        "image/webp" => "webp",
        "audio/webm" | "video/webm" => "webm",
        "audio/ogg" => "ogg",
        "audio/mpeg" => "mp3",
        "audio/wav" | "audio/x-wav" => "wav",
        "audio/mp4" => "m4a",
        "video/mp4" => "mp4",
        "text/plain" => "txt",
        _ => "bin",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRef {
    pub kind: ArtifactKind,
    /// Relative to the content root, `/`-separated.
    pub blob_path: String,
    pub media_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
    pub size_bytes: u64,
    pub sha256: String,
}

/// A catalog entry: the transcript plus an optional video file under the
/// videos directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    #[serde(flatten)]
    pub transcript: Transcript,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedActivity {
    pub activity_type: ActivityType,
    pub activity: ChildActivity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub session_id: String,
    pub child_id: String,
    pub episode_id: String,
    pub condition: Condition,
    pub seed: u64,
    pub selected_activity: Option<SelectedActivity>,
    pub artifact: Option<ArtifactRef>,
    pub verbal_explanation: Option<ArtifactRef>,
    pub created_at: DateTime<Utc>,
    pub completed_at: Option<DateTime<Utc>>,
}

impl SessionRecord {
    pub fn is_complete(&self) -> bool {
        self.completed_at.is_some()
    }

    fn blob_refs(&self) -> impl Iterator<Item = &ArtifactRef> {
        self.artifact.iter().chain(self.verbal_explanation.iter())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityReport {
    pub records: usize,
    /// Documents that fail to parse.
    pub torn_records: Vec<String>,
    /// Blob paths referenced by a session but missing on disk.
    pub dangling_refs: Vec<String>,
    /// Blobs no session references.
    pub orphan_blobs: Vec<String>,
    /// Leftover temporary files from interrupted writes.
    pub temp_files: Vec<String>,
}

impl IntegrityReport {
    pub fn is_clean(&self) -> bool {
        self.torn_records.is_empty()
            && self.dangling_refs.is_empty()
            && self.orphan_blobs.is_empty()
            && self.temp_files.is_empty()
    }
}

pub struct Store {
    root: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

/// Ids become file names, so they are restricted to a safe alphabet.
pub fn check_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidId(id.to_string()))
    }
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::Builder::new().prefix(TEMP_PREFIX).tempfile_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| StoreError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

impl Store {
    /// Opens (creating if needed) a content root and runs recovery.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        for dir in DIRS {
            let path = root.join(dir);
            std::fs::create_dir_all(&path).map_err(io_err(&path))?;
        }
        let store = Store { root, locks: Mutex::new(HashMap::new()) };
        store.recover()?;
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Lock serializing read-modify-write cycles on one session.
    pub fn session_lock(&self, session_id: &str) -> Arc<Mutex<()>> {
        self.locks.lock().entry(session_id.to_string()).or_default().clone()
    }

    fn doc_path(&self, dir: &str, id: &str) -> Result<PathBuf, StoreError> {
        check_id(id)?;
        Ok(self.root.join(dir).join(format!("{id}.json")))
    }

    fn write_doc<T: Serialize>(&self, dir: &str, id: &str, value: &T) -> Result<(), StoreError> {
        let path = self.doc_path(dir, id)?;
        let mut bytes = serde_json::to_vec_pretty(value).expect("records serialize");
        bytes.push(b'\n');
        write_atomic(&path, &bytes)
    }

    fn read_doc<T: DeserializeOwned>(&self, dir: &str, id: &str) -> Result<Option<T>, StoreError> {
        let path = self.doc_path(dir, id)?;
        read_json(&path)
    }

    fn list_docs<T: DeserializeOwned>(&self, dir: &str) -> Result<Vec<T>, StoreError> {
        let mut out = Vec::new();
        for path in sorted_files(&self.root.join(dir))? {
            if path.extension().is_some_and(|e| e == "json") && !is_temp(&path) {
                if let Some(doc) = read_json(&path)? {
                    out.push(doc);
                }
            }
        }
        Ok(out)
    }

    pub fn put_episode(&self, episode: &EpisodeRecord) -> Result<(), StoreError> {
        self.write_doc("episodes", &episode.transcript.episode_id, episode)
    }

    pub fn get_episode(&self, id: &str) -> Result<Option<EpisodeRecord>, StoreError> {
        match check_id(id) {
            Ok(()) => self.read_doc("episodes", id),
            Err(_) => Ok(None),
        }
    }

    /// Catalog in episode id order.
    pub fn list_episodes(&self) -> Result<Vec<EpisodeRecord>, StoreError> {
        self.list_docs("episodes")
    }

    pub fn put_session(&self, session: &SessionRecord) -> Result<(), StoreError> {
        self.write_doc("sessions", &session.session_id, session)
    }

    pub fn get_session(&self, id: &str) -> Result<Option<SessionRecord>, StoreError> {
        match check_id(id) {
            Ok(()) => self.read_doc("sessions", id),
            Err(_) => Ok(None),
        }
    }

    pub fn list_sessions(&self) -> Result<Vec<SessionRecord>, StoreError> {
        self.list_docs("sessions")
    }

    pub fn put_output(&self, session_id: &str, output: &PipelineOutput) -> Result<(), StoreError> {
        self.write_doc("outputs", session_id, output)
    }

    pub fn get_output(&self, session_id: &str) -> Result<Option<PipelineOutput>, StoreError> {
        self.read_doc("outputs", session_id)
    }

    pub fn put_summary(&self, session_id: &str, summary: &EpisodeSummary) -> Result<(), StoreError> {
        self.write_doc("summaries", session_id, summary)
    }

    pub fn get_summary(&self, session_id: &str) -> Result<Option<EpisodeSummary>, StoreError> {
        self.read_doc("summaries", session_id)
    }

    /// Stores a blob for `session_id`. The caller records the returned
    /// reference in the session; until then the blob is an orphan that
    /// recovery would delete.
    pub fn write_blob(
        &self,
        session_id: &str,
        kind: ArtifactKind,
        media_type: &str,
        bytes: &[u8],
        duration_seconds: Option<f64>,
    ) -> Result<ArtifactRef, StoreError> {
        check_id(session_id)?;
        let name = format!("{}.{}", uuid::Uuid::new_v4().simple(), extension_for(media_type));
        let blob_path = format!("blobs/{session_id}/{name}");
        write_atomic(&self.root.join(&blob_path), bytes)?;
        Ok(ArtifactRef {
            kind,
            blob_path,
            media_type: media_type.to_string(),
            duration_seconds,
            size_bytes: bytes.len() as u64,
            sha256: easel_core::digest::sha256_hex(bytes),
        })
    }

    /// Absolute path of a stored blob, or `None` if the reference escapes
    /// the blob tree.
    pub fn blob_file(&self, blob_path: &str) -> Option<PathBuf> {
        let mut parts = blob_path.split('/');
        let (Some("blobs"), Some(session), Some(name), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return None;
        };
        (check_id(session).is_ok() && check_id(name).is_ok()).then(|| self.root.join("blobs").join(session).join(name))
    }

    pub fn read_blob(&self, artifact: &ArtifactRef) -> Result<Vec<u8>, StoreError> {
        let path = self
            .blob_file(&artifact.blob_path)
            .ok_or_else(|| StoreError::InvalidId(artifact.blob_path.clone()))?;
        std::fs::read(&path).map_err(io_err(&path))
    }

    /// Checks documents and blobs without modifying anything.
    pub fn scan(&self) -> Result<IntegrityReport, StoreError> {
        let mut report = IntegrityReport::default();
        let mut referenced = BTreeSet::new();
        for dir in DIRS.iter().filter(|d| **d != "blobs") {
            for path in sorted_files(&self.root.join(dir))? {
                let rel = self.relative(&path);
                if is_temp(&path) {
                    report.temp_files.push(rel);
                    continue;
                }
                report.records += 1;
                let text = std::fs::read(&path).map_err(io_err(&path))?;
                let parsed = match *dir {
                    "sessions" => serde_json::from_slice::<SessionRecord>(&text).map(|s| {
                        referenced.extend(s.blob_refs().map(|a| a.blob_path.clone()));
                    }),
                    "outputs" => serde_json::from_slice::<PipelineOutput>(&text).map(drop),
                    "summaries" => serde_json::from_slice::<EpisodeSummary>(&text).map(drop),
                    _ => serde_json::from_slice::<EpisodeRecord>(&text).map(drop),
                };
                if parsed.is_err() {
                    report.torn_records.push(rel);
                }
            }
        }
        let mut present = BTreeSet::new();
        for session_dir in sorted_dirs(&self.root.join("blobs"))? {
            for path in sorted_files(&session_dir)? {
                let rel = self.relative(&path);
                if is_temp(&path) {
                    report.temp_files.push(rel);
                } else {
                    present.insert(rel);
                }
            }
        }
        report.dangling_refs = referenced.difference(&present).cloned().collect();
        report.orphan_blobs = present.difference(&referenced).cloned().collect();
        Ok(report)
    }

    /// Removes leftovers of interrupted writes: temporary files, and blobs
    /// whose session update never landed. Returns what was removed.
    pub fn recover(&self) -> Result<IntegrityReport, StoreError> {
        let report = self.scan()?;
        for rel in report.temp_files.iter().chain(&report.orphan_blobs) {
            let path = self.root.join(rel);
            if let Err(e) = std::fs::remove_file(&path) {
                if e.kind() != std::io::ErrorKind::NotFound {
                    return Err(StoreError::Io { path, source: e });
                }
            }
        }
        if !report.temp_files.is_empty() || !report.orphan_blobs.is_empty() {
            tracing::warn!(
                temp_files = report.temp_files.len(),
                orphan_blobs = report.orphan_blobs.len(),
                "removed leftovers of interrupted writes"
            );
        }
        Ok(report)
    }

    fn relative(&self, path: &Path) -> String {
        path.strip_prefix(&self.root)
            .unwrap_or(path)
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/")
    }
}

fn is_temp(path: &Path) -> bool {
    path.file_name().is_some_and(|n| n.to_string_lossy().starts_with(TEMP_PREFIX))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<Option<T>, StoreError> {
    match std::fs::read(path) {
        Ok(bytes) => serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|source| StoreError::Json { path: path.to_path_buf(), source }),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(StoreError::Io { path: path.to_path_buf(), source: e }),
    }
}

fn sorted_entries(dir: &Path, want_dirs: bool) -> Result<Vec<PathBuf>, StoreError> {
    let mut out = Vec::new();
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(StoreError::Io { path: dir.to_path_buf(), source: e }),
    };
    for entry in entries {
        let entry = entry.map_err(io_err(dir))?;
        let is_dir = entry.file_type().map_err(io_err(dir))?.is_dir();
        if is_dir == want_dirs {
            out.push(entry.path());
        }
    }
    out.sort();
    Ok(out)
}

fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
    sorted_entries(dir, false)
}

fn sorted_dirs(dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
    sorted_entries(dir, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn episode(id: &str) -> EpisodeRecord {
        EpisodeRecord {
            transcript: Transcript {
                episode_id: id.into(),
                title: "T".into(),
                body: "b".into(),
                duration_minutes: Some(11.0),
                source_note: None,
            },
            video: Some(format!("{id}.mp4")),
        }
    }

    #[test]
    fn documents_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        store.put_episode(&episode("e2")).unwrap();
        store.put_episode(&episode("e1")).unwrap();
        assert_eq!(store.get_episode("e1").unwrap(), Some(episode("e1")));
        assert_eq!(store.get_episode("nope").unwrap(), None);
        assert_eq!(store.get_episode("../x").unwrap(), None);
        let ids: Vec<_> = store.list_episodes().unwrap().into_iter().map(|e| e.transcript.episode_id).collect();
        assert_eq!(ids, ["e1", "e2"]);
        assert!(store.scan().unwrap().is_clean());
    }

    #[test]
    fn recovery_removes_temp_files_and_orphans() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        store.put_episode(&episode("e1")).unwrap();
        std::fs::write(dir.path().join("sessions/.tmp-abc"), b"{\"session_id\": \"s").unwrap();
        let orphan = store.write_blob("s1", ArtifactKind::Drawing, "image/png", b"png", None).unwrap();
        let report = store.scan().unwrap();
        assert_eq!(report.temp_files, ["sessions/.tmp-abc"]);
        assert_eq!(report.orphan_blobs, std::slice::from_ref(&orphan.blob_path));
        assert!(report.torn_records.is_empty());
        drop(store);
        let store = Store::open(dir.path()).unwrap();
        assert!(store.scan().unwrap().is_clean());
        assert_eq!(store.get_episode("e1").unwrap(), Some(episode("e1")));
    }

    #[test]
    fn blob_paths_stay_inside_root() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        assert!(store.blob_file("blobs/s1/x.png").is_some());
        for bad in ["blobs/../x", "blobs/s1/../../etc", "sessions/s1.json", "blobs/s1"] {
            assert!(store.blob_file(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn media_kinds() {
        assert!(ArtifactKind::Drawing.accepts("image/png"));
        assert!(ArtifactKind::Audio.accepts("audio/webm;codecs=opus"));
        assert!(!ArtifactKind::Audio.accepts("image/png"));
        assert!(!ArtifactKind::Text.accepts(""));
    }
}
