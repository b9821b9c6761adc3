//! Evaluation computations: detection scoring against gold labels,
//! inter-rater agreement, explanation similarity, and aggregation of
//! human quality annotations.

mod agreement;
mod annotations;
mod scoring;
mod similarity;

pub use agreement::{krippendorff_alpha, percent_agreement, AgreementError, AlphaResult, RaterTable};
pub use annotations::{
    aggregate_annotations, child_activity_schema, parent_starter_schema, AnnotationRecord,
    AnnotationSchema, AnnotationValue, BinarySummary, CriterionShare, MetricKind, MetricReport,
    MetricSpec, QualityReport, ReflectionCriterion, ReflectionSummary, SchemaViolation,
};
pub use scoring::{score_detection, DetectionScores, GoldLabel, GoldLabelSet, ScoringError, SkillScore};
pub use similarity::{
    cosine_similarity, embed_text, explanation_similarity, EmbedError, Embedder, HashEmbedder,
    SimilarityError, SimilarityReport,
};
