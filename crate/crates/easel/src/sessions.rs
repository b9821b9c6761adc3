//! Session lifecycle: creation, lazy pipeline runs, activity selection,
//! artifact uploads, completion, and the parent view.

use std::sync::Arc;

use chrono::Utc;
use easel_core::retelling::Condition;
use easel_core::{
    ActivityType, ChildActivity, EpisodeSummary, ParentStarter, SkillId, TaxonomyDataset, TemplateSet,
};
use serde::{Deserialize, Serialize};

use crate::pipeline::{Pipeline, PipelineConfig, PipelineError, PipelineOutput};
use crate::provider::ChatProvider;
use crate::store::{ArtifactKind, ArtifactRef, EpisodeRecord, SelectedActivity, SessionRecord, Store, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("unknown episode `{0}`")]
    UnknownEpisode(String),
    #[error("session `{0}` not found")]
    SessionNotFound(String),
    #[error("session has no selected activity")]
    ActivityNotSelected,
    #[error("no-activity sessions have no activities")]
    NoActivityCondition,
    #[error("activity type {0} was not generated for this session")]
    InvalidSelection(ActivityType),
    #[error("an activity artifact is already recorded")]
    ArtifactAlreadyRecorded,
    #[error("upload the activity artifact before its explanation")]
    ArtifactMissing,
    #[error("the artifact needs a recorded audio explanation")]
    ExplanationRequired,
    #[error("media type `{media_type}` does not fit a {kind} artifact")]
    MediaMismatch { kind: ArtifactKind, media_type: String },
    #[error("uploaded blob is empty")]
    EmptyBlob,
    #[error("session is already complete")]
    AlreadyCompleted,
    #[error("session is not complete")]
    SessionIncomplete,
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Explicit purpose of an upload. Inferred from session state when absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UploadRole {
    Artifact,
    Explanation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Upload {
    pub kind: ArtifactKind,
    pub media_type: String,
    pub bytes: Vec<u8>,
    pub role: Option<UploadRole>,
    pub duration_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeInfo {
    pub episode_id: String,
    pub title: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_minutes: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub video_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillInfo {
    pub id: SkillId,
    pub description: String,
    pub definition: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactView {
    pub activity_type: ActivityType,
    pub activity_prompt: String,
    pub artifact: ArtifactRef,
    pub verbal_explanation: Option<ArtifactRef>,
}

/// What the parent sees for one completed session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParentView {
    pub session_id: String,
    pub child_id: String,
    pub episode_id: String,
    pub episode_title: String,
    pub condition: Condition,
    pub summary: EpisodeSummary,
    pub skill: Option<SkillInfo>,
    pub artifact: Option<ArtifactView>,
    pub conversation_starter: Option<ParentStarter>,
}

/// Per-session seed: the configured seed mixed with the session id, so
/// sessions differ while each one replays identically.
pub fn session_seed(base: u64, session_id: &str) -> u64 {
    let hex = easel_core::digest::sha256_parts([base.to_string().as_str(), session_id]);
    u64::from_str_radix(&hex[..16], 16).expect("hex digest")
}

pub struct SessionService {
    store: Arc<Store>,
    taxonomy: TaxonomyDataset,
    templates: TemplateSet,
    provider: Arc<dyn ChatProvider>,
    pipeline: PipelineConfig,
    explanation_required: Vec<ArtifactKind>,
}

impl SessionService {
    pub fn new(
        store: Arc<Store>,
        taxonomy: TaxonomyDataset,
        templates: TemplateSet,
        provider: Arc<dyn ChatProvider>,
        pipeline: PipelineConfig,
        explanation_required: Vec<ArtifactKind>,
    ) -> Result<Self, SessionError> {
        pipeline.validate()?;
        Ok(SessionService { store, taxonomy, templates, provider, pipeline, explanation_required })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn episodes(&self) -> Result<Vec<EpisodeInfo>, SessionError> {
        Ok(self
            .store
            .list_episodes()?
            .into_iter()
            .map(|e| EpisodeInfo {
                video_url: e.video.as_ref().map(|v| format!("/videos/{v}")),
                episode_id: e.transcript.episode_id,
                title: e.transcript.title,
                duration_minutes: e.transcript.duration_minutes,
            })
            .collect())
    }

    fn episode(&self, id: &str) -> Result<EpisodeRecord, SessionError> {
        self.store.get_episode(id)?.ok_or_else(|| SessionError::UnknownEpisode(id.to_string()))
    }

    pub fn session(&self, id: &str) -> Result<SessionRecord, SessionError> {
        self.store.get_session(id)?.ok_or_else(|| SessionError::SessionNotFound(id.to_string()))
    }

    pub fn create_session(
        &self,
        child_id: &str,
        episode_id: &str,
        condition: Condition,
    ) -> Result<SessionRecord, SessionError> {
        if child_id.trim().is_empty() {
            return Err(SessionError::Invalid("child_id is empty".into()));
        }
        self.episode(episode_id)?;
        let session_id = uuid::Uuid::new_v4().to_string();
        let record = SessionRecord {
            seed: session_seed(self.pipeline.seed, &session_id),
            session_id,
            child_id: child_id.to_string(),
            episode_id: episode_id.to_string(),
            condition,
            selected_activity: None,
            artifact: None,
            verbal_explanation: None,
            created_at: Utc::now(),
            completed_at: None,
        };
        self.store.put_session(&record)?;
        Ok(record)
    }

    /// Persisted pipeline output, running the pipeline on first use.
    /// Callers hold the session lock.
    fn ensure_output(&self, session: &SessionRecord) -> Result<PipelineOutput, SessionError> {
        if let Some(output) = self.store.get_output(&session.session_id)? {
            return Ok(output);
        }
        let episode = self.episode(&session.episode_id)?;
        let config = PipelineConfig { seed: session.seed, ..self.pipeline.clone() };
        let pipeline = Pipeline::new(&self.taxonomy, &self.templates, self.provider.as_ref(), &config)?;
        let output = pipeline.run(&episode.transcript)?;
        self.store.put_output(&session.session_id, &output)?;
        Ok(output)
    }

    /// The session's write lock. Records must be re-read after locking.
    fn lock_for(&self, id: &str) -> Result<Arc<parking_lot::Mutex<()>>, SessionError> {
        self.session(id)?;
        Ok(self.store.session_lock(id))
    }

    /// Generated activity variants for an activity session. Empty when no
    /// skill was detected in the episode.
    pub fn activities(&self, session_id: &str) -> Result<Vec<ChildActivity>, SessionError> {
        let lock = self.lock_for(session_id)?;
        let _guard = lock.lock();
        let session = self.session(session_id)?;
        if session.condition != Condition::EaselActivity {
            return Err(SessionError::NoActivityCondition);
        }
        Ok(self.ensure_output(&session)?.child_activities)
    }

    pub fn select_activity(&self, session_id: &str, activity_type: ActivityType) -> Result<SessionRecord, SessionError> {
        let lock = self.lock_for(session_id)?;
        let _guard = lock.lock();
        let mut session = self.session(session_id)?;
        if session.condition != Condition::EaselActivity {
            return Err(SessionError::NoActivityCondition);
        }
        if session.artifact.is_some() {
            return Err(SessionError::ArtifactAlreadyRecorded);
        }
        let output = self.ensure_output(&session)?;
        let activity = output.activity(activity_type).cloned().ok_or(SessionError::InvalidSelection(activity_type))?;
        session.selected_activity = Some(SelectedActivity { activity_type, activity });
        self.store.put_session(&session)?;
        Ok(session)
    }

    fn needs_explanation(&self, kind: ArtifactKind) -> bool {
        self.explanation_required.contains(&kind)
    }

    /// Records the child's artifact or its verbal explanation. The session
    /// completes once the artifact is in and, for kinds that need one, an
    /// audio explanation has followed it.
    pub fn record_artifact(&self, session_id: &str, upload: Upload) -> Result<SessionRecord, SessionError> {
        let lock = self.lock_for(session_id)?;
        let _guard = lock.lock();
        let mut session = self.session(session_id)?;
        if session.condition != Condition::EaselActivity || session.selected_activity.is_none() {
            return Err(SessionError::ActivityNotSelected);
        }
        if session.is_complete() {
            return Err(SessionError::AlreadyCompleted);
        }
        if upload.bytes.is_empty() {
            return Err(SessionError::EmptyBlob);
        }
        if !upload.kind.accepts(&upload.media_type) {
            return Err(SessionError::MediaMismatch { kind: upload.kind, media_type: upload.media_type });
        }
        let role = match (&session.artifact, upload.role) {
            (None, Some(UploadRole::Explanation)) => return Err(SessionError::ArtifactMissing),
            (None, _) => UploadRole::Artifact,
            (Some(_), Some(UploadRole::Artifact)) => return Err(SessionError::ArtifactAlreadyRecorded),
            (Some(_), _) => UploadRole::Explanation,
        };
        if role == UploadRole::Explanation && upload.kind != ArtifactKind::Audio {
            return Err(SessionError::ExplanationRequired);
        }
        let blob = self.store.write_blob(
            session_id,
            upload.kind,
            &upload.media_type,
            &upload.bytes,
            upload.duration_seconds,
        )?;
        match role {
            UploadRole::Artifact => {
                let done = !self.needs_explanation(upload.kind);
                session.artifact = Some(blob);
                if done {
                    session.completed_at = Some(Utc::now());
                }
            }
            UploadRole::Explanation => {
                session.verbal_explanation = Some(blob);
                session.completed_at = Some(Utc::now());
            }
        }
        self.store.put_session(&session)?;
        Ok(session)
    }

    /// Marks a session finished when it has no activity to do: a
    /// no-activity session, or an activity session whose episode yielded no
    /// skill.
    pub fn complete(&self, session_id: &str) -> Result<SessionRecord, SessionError> {
        let lock = self.lock_for(session_id)?;
        let _guard = lock.lock();
        let mut session = self.session(session_id)?;
        if session.is_complete() {
            return Ok(session);
        }
        match session.condition {
            Condition::NoActivity => {
                if self.store.get_summary(session_id)?.is_none() {
                    let episode = self.episode(&session.episode_id)?;
                    let config = PipelineConfig { seed: session.seed, ..self.pipeline.clone() };
                    let pipeline = Pipeline::new(&self.taxonomy, &self.templates, self.provider.as_ref(), &config)?;
                    let summary = pipeline.summarize_episode(&episode.transcript)?;
                    self.store.put_summary(session_id, &summary)?;
                }
            }
            Condition::EaselActivity => {
                let output = self.ensure_output(&session)?;
                if output.selected_skill.is_some() {
                    return Err(match (&session.selected_activity, &session.artifact) {
                        (None, _) => SessionError::ActivityNotSelected,
                        (Some(_), None) => SessionError::ArtifactMissing,
                        (Some(_), Some(_)) => SessionError::ExplanationRequired,
                    });
                }
            }
        }
        session.completed_at = Some(Utc::now());
        self.store.put_session(&session)?;
        Ok(session)
    }

    /// Read-only projection of a completed session's persisted state.
    pub fn parent_view(&self, session_id: &str) -> Result<ParentView, SessionError> {
        let session = self.session(session_id)?;
        if !session.is_complete() {
            return Err(SessionError::SessionIncomplete);
        }
        let episode = self.episode(&session.episode_id)?;
        let mut view = ParentView {
            session_id: session.session_id.clone(),
            child_id: session.child_id.clone(),
            episode_id: session.episode_id.clone(),
            episode_title: episode.transcript.title,
            condition: session.condition,
            summary: EpisodeSummary { episode_id: session.episode_id.clone(), summary_text: String::new() },
            skill: None,
            artifact: None,
            conversation_starter: None,
        };
        match session.condition {
            Condition::NoActivity => {
                view.summary = self.store.get_summary(session_id)?.ok_or(SessionError::SessionIncomplete)?;
            }
            Condition::EaselActivity => {
                let output = self.store.get_output(session_id)?.ok_or(SessionError::SessionIncomplete)?;
                view.summary = output.summary;
                view.skill = output.selected_skill.map(|id| {
                    let s = self.taxonomy.lookup(id);
                    SkillInfo { id, description: s.description.clone(), definition: s.definition.clone() }
                });
                view.conversation_starter = output.parent_starter;
                if let (Some(selected), Some(artifact)) = (session.selected_activity, session.artifact) {
                    view.artifact = Some(ArtifactView {
                        activity_type: selected.activity_type,
                        activity_prompt: selected.activity.prompt_text,
                        artifact,
                        verbal_explanation: session.verbal_explanation,
                    });
                }
            }
        }
        Ok(view)
    }
}
