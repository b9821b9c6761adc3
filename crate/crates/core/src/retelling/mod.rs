//! Emotion-word analysis of children's episode retellings and the paired
//! nonparametric statistics used to compare study conditions.

mod compare;
mod lexicon;
mod stats;
mod tokenize;

pub use compare::{
    compare_conditions, compare_conditions_with, CategoryComparison, ComparisonReport, CompareError, Condition,
    ConditionSummary, RetellingRecord,
};
pub use lexicon::{
    extract_emotion_features, match_lexicon, CategoryFeatures, EmotionFeatures, Lexicon,
    LexiconCategory, LexiconEntry, LexiconError, LexiconName,
};
pub use stats::{
    cliffs_delta, wilcoxon_signed_rank, wilcoxon_signed_rank_with, PValueMethod, StatsError,
    WilcoxonResult, ZeroHandling,
};
pub use tokenize::tokenize;
