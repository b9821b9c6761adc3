//! Aggregation of human quality judgments of generated activities and
//! conversation starters: mean opinion scores with normal-approximation 95%
//! confidence intervals, Likert distributions, binary yes-rates, and
//! reflection-checklist prevalence.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// 1 (strongly disagree) to 5 (strongly agree), coded so 5 is favorable.
    Likert,
    Binary,
    /// Subset of the six reflection criteria.
    Checklist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionCriterion {
    Experience,
    Feelings,
    Perspectives,
    SelfAwareness,
    BasisForChange,
    AlternativeActions,
}

impl ReflectionCriterion {
    pub const ALL: [ReflectionCriterion; 6] = [
        ReflectionCriterion::Experience,
        ReflectionCriterion::Feelings,
        ReflectionCriterion::Perspectives,
        ReflectionCriterion::SelfAwareness,
        ReflectionCriterion::BasisForChange,
        ReflectionCriterion::AlternativeActions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReflectionCriterion::Experience => "experience",
            ReflectionCriterion::Feelings => "feelings",
            ReflectionCriterion::Perspectives => "perspectives",
            ReflectionCriterion::SelfAwareness => "self_awareness",
            ReflectionCriterion::BasisForChange => "basis_for_change",
            ReflectionCriterion::AlternativeActions => "alternative_actions",
        }
    }
}

impl FromStr for ReflectionCriterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        ReflectionCriterion::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown reflection criterion `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationValue {
    Likert(u8),
    Binary(bool),
    Checklist(BTreeSet<ReflectionCriterion>),
}

const LIKERT_LABELS: [&str; 5] = [
    "strongly disagree",
    "somewhat disagree",
    "neutral",
    "somewhat agree",
    "strongly agree",
];

impl AnnotationValue {
    pub fn kind(&self) -> MetricKind {
        match self {
            AnnotationValue::Likert(_) => MetricKind::Likert,
            AnnotationValue::Binary(_) => MetricKind::Binary,
            AnnotationValue::Checklist(_) => MetricKind::Checklist,
        }
    }

    /// Parses the textual cell of an annotation file for a metric of `kind`.
    ///
    /// Likert accepts `1`..`5` or the survey labels; binary accepts
    /// yes/no, true/false, 1/0; checklists are `;`-separated criterion ids,
    /// with an empty cell or `none` meaning no criterion was checked.
    pub fn parse(kind: MetricKind, text: &str) -> Result<Self, String> {
        let t = text.trim().to_lowercase();
        match kind {
            MetricKind::Likert => {
                if let Ok(v) = t.parse::<u8>() {
                    return Ok(AnnotationValue::Likert(v));
                }
                LIKERT_LABELS
                    .iter()
                    .position(|l| *l == t)
                    .map(|i| AnnotationValue::Likert(i as u8 + 1))
                    .ok_or_else(|| format!("`{text}` is not a Likert rating"))
            }
            MetricKind::Binary => match t.as_str() {
                "yes" | "y" | "true" | "1" => Ok(AnnotationValue::Binary(true)),
                "no" | "n" | "false" | "0" => Ok(AnnotationValue::Binary(false)),
                _ => Err(format!("`{text}` is not a yes/no answer")),
            },
            MetricKind::Checklist => {
                if t.is_empty() || t == "none" || t == "none of the above" {
                    return Ok(AnnotationValue::Checklist(BTreeSet::new()));
                }
                t.split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map(AnnotationValue::Checklist)
            }
        }
    }

    /// Inverse of [`AnnotationValue::parse`].
    pub fn to_cell(&self) -> String {
        match self {
            AnnotationValue::Likert(v) => v.to_string(),
            AnnotationValue::Binary(b) => (if *b { "yes" } else { "no" }).to_string(),
            AnnotationValue::Checklist(set) => set
                .iter()
                .map(|c| c.as_str())
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

/// One annotator's answer to one question about one generated item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub annotator_id: String,
    pub item_id: String,
    pub metric_id: String,
    pub value: AnnotationValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub id: String,
    pub kind: MetricKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSchema {
    pub name: String,
    pub metrics: Vec<MetricSpec>,
}

impl AnnotationSchema {
    pub fn metric(&self, id: &str) -> Option<&MetricSpec> {
        self.metrics.iter().find(|m| m.id == id)
    }
}

fn spec(id: &str, kind: MetricKind, label: &str) -> MetricSpec {
    MetricSpec {
        id: id.to_string(),
        kind,
        label: label.to_string(),
    }
}

/// Questions asked about each generated child activity.
pub fn child_activity_schema() -> AnnotationSchema {
    use MetricKind::*;
    AnnotationSchema {
        name: "child_activity".into(),
        metrics: alloc::vec![
            spec("skill_relevance", Likert, "SEL skill relevance"),
            spec("moment_relevance", Likert, "SEL moment relevance"),
            spec("activity_grounded", Binary, "Prompts the specified activity type"),
            spec("lexical_simplicity", Likert, "No complex words"),
            spec("syntactic_simplicity", Likert, "Sentences not too long or complex"),
            spec("topic_shifts", Likert, "No rapid topic shifts"),
            spec("topic_familiarity", Likert, "Topics familiar to children 5-8"),
            spec("no_nested_questions", Binary, "No nested questions"),
            spec("not_yes_no", Binary, "Not a yes/no question"),
            spec("child_alone", Binary, "Does not involve another person"),
            spec("reflection", Checklist, "Reflection criteria"),
        ],
    }
}

/// Questions asked about each generated parent conversation starter.
pub fn parent_starter_schema() -> AnnotationSchema {
    use MetricKind::*;
    AnnotationSchema {
        name: "parent_starter".into(),
        metrics: alloc::vec![
            spec("skill_relevance", Likert, "SEL skill relevance"),
            spec("moment_relevance", Likert, "SEL moment relevance"),
            spec("meaningful_dialogue", Likert, "Fosters meaningful parent-child dialogue"),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaViolation {
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("metric `{metric}` expects a {expected:?} value, got {found:?}")]
    WrongKind {
        metric: String,
        expected: MetricKind,
        found: MetricKind,
    },
    #[error("Likert value {value} out of range 1..=5 for `{metric}`")]
    LikertOutOfRange { metric: String, value: u8 },
    #[error("annotator `{annotator}` rated ({item}, {metric}) twice")]
    Duplicate {
        annotator: String,
        item: String,
        metric: String,
    },
    #[error("item `{item}` has no rating for `{metric}`")]
    MissingRating { item: String, metric: String },
    #[error("no annotation records")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySummary {
    pub yes: usize,
    pub no: usize,
    pub yes_percent: f64,
    pub no_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionShare {
    pub criterion: ReflectionCriterion,
    pub count: usize,
    /// Share of all checked criteria.
    pub percent_of_checks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionSummary {
    pub per_criterion: Vec<CriterionShare>,
    pub total_checks: usize,
    /// Items where at least one annotator checked at least one criterion.
    pub items_with_any: usize,
    pub percent_items_with_any: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric_id: String,
    pub label: String,
    pub kind: MetricKind,
    pub n_ratings: usize,
    pub n_items: usize,
    /// Mean over pooled ratings (yes = 1 for binary metrics).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mos: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci95: Option<(f64, f64)>,
    /// Percent of ratings at 1, 2, 3, 4, 5.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub likert_percentages: Option<[f64; 5]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary: Option<BinarySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflection: Option<ReflectionSummary>,
    /// Per-item mean rating, sorted by item id.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub item_means: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub schema: String,
    pub n_items: usize,
    pub n_annotators: usize,
    /// In schema order.
    pub metrics: Vec<MetricReport>,
}

impl QualityReport {
    pub fn metric(&self, id: &str) -> Option<&MetricReport> {
        self.metrics.iter().find(|m| m.metric_id == id)
    }
}

fn percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

/// Mean, sample standard deviation, and mean ± 1.96·s/√n.
fn mean_ci(values: &[f64]) -> (f64, f64, (f64, f64)) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() < 2 {
        0.0
    } else {
        libm::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
    };
    let half = 1.96 * sd / libm::sqrt(n);
    (mean, sd, (mean - half, mean + half))
}

fn validate(records: &[AnnotationRecord], schema: &AnnotationSchema) -> Result<(), SchemaViolation> {
    if records.is_empty() {
        return Err(SchemaViolation::Empty);
    }
    let mut seen = BTreeSet::new();
    for r in records {
        let metric = schema
            .metric(&r.metric_id)
            .ok_or_else(|| SchemaViolation::UnknownMetric(r.metric_id.clone()))?;
        if r.value.kind() != metric.kind {
            return Err(SchemaViolation::WrongKind {
                metric: r.metric_id.clone(),
                expected: metric.kind,
                found: r.value.kind(),
            });
        }
        if let AnnotationValue::Likert(v) = r.value {
            if !(1..=5).contains(&v) {
                return Err(SchemaViolation::LikertOutOfRange {
                    metric: r.metric_id.clone(),
                    value: v,
                });
            }
        }
        if !seen.insert((&r.annotator_id, &r.item_id, &r.metric_id)) {
            return Err(SchemaViolation::Duplicate {
                annotator: r.annotator_id.clone(),
                item: r.item_id.clone(),
                metric: r.metric_id.clone(),
            });
        }
    }
    Ok(())
}

/// Aggregates annotation records into per-metric quality statistics.
///
/// Every item that appears in `records` must be rated at least once on every
/// metric of `schema`.
pub fn aggregate_annotations(
    records: &[AnnotationRecord],
    schema: &AnnotationSchema,
) -> Result<QualityReport, SchemaViolation> {
    validate(records, schema)?;
    let items: BTreeSet<&str> = records.iter().map(|r| r.item_id.as_str()).collect();
    let annotators: BTreeSet<&str> = records.iter().map(|r| r.annotator_id.as_str()).collect();

    let mut metrics = Vec::with_capacity(schema.metrics.len());
    for spec in &schema.metrics {
        // item -> values, ordered by item id
        let mut by_item: BTreeMap<&str, Vec<&AnnotationValue>> = BTreeMap::new();
        for r in records.iter().filter(|r| r.metric_id == spec.id) {
            by_item.entry(r.item_id.as_str()).or_default().push(&r.value);
        }
        if let Some(item) = items.iter().find(|i| !by_item.contains_key(*i)) {
            return Err(SchemaViolation::MissingRating {
                item: item.to_string(),
                metric: spec.id.clone(),
            });
        }
        let n_ratings = by_item.values().map(Vec::len).sum();
        let mut report = MetricReport {
            metric_id: spec.id.clone(),
            label: spec.label.clone(),
            kind: spec.kind,
            n_ratings,
            n_items: by_item.len(),
            mos: None,
            std_dev: None,
            ci95: None,
            likert_percentages: None,
            binary: None,
            reflection: None,
            item_means: Vec::new(),
        };
        let numeric = |v: &AnnotationValue| match v {
            AnnotationValue::Likert(x) => *x as f64,
            AnnotationValue::Binary(b) => *b as u8 as f64,
            AnnotationValue::Checklist(_) => unreachable!("checked by kind"),
        };
        match spec.kind {
            MetricKind::Likert | MetricKind::Binary => {
                let pooled: Vec<f64> = by_item.values().flatten().map(|v| numeric(v)).collect();
                let (mean, sd, ci) = mean_ci(&pooled);
                report.mos = Some(mean);
                report.std_dev = Some(sd);
                report.ci95 = Some(ci);
                report.item_means = by_item
                    .iter()
                    .map(|(item, vs)| {
                        let m = vs.iter().map(|v| numeric(v)).sum::<f64>() / vs.len() as f64;
                        (item.to_string(), m)
                    })
                    .collect();
                if spec.kind == MetricKind::Likert {
                    let mut counts = [0usize; 5];
                    for v in &pooled {
                        counts[*v as usize - 1] += 1;
                    }
                    report.likert_percentages = Some(counts.map(|c| percent(c, n_ratings)));
                } else {
                    let yes = pooled.iter().filter(|v| **v == 1.0).count();
                    let no = n_ratings - yes;
                    report.binary = Some(BinarySummary {
                        yes,
                        no,
                        yes_percent: percent(yes, n_ratings),
                        no_percent: percent(no, n_ratings),
                    });
                }
            }
            MetricKind::Checklist => {
                let mut counts = [0usize; 6];
                let mut items_with_any = 0;
                for values in by_item.values() {
                    let mut any = false;
                    for v in values {
                        if let AnnotationValue::Checklist(set) = v {
                            any |= !set.is_empty();
                            for c in set {
                                counts[*c as usize] += 1;
                            }
                        }
                    }
                    items_with_any += any as usize;
                }
                let total_checks = counts.iter().sum();
                report.reflection = Some(ReflectionSummary {
                    per_criterion: ReflectionCriterion::ALL
                        .into_iter()
                        .map(|c| CriterionShare {
                            criterion: c,
                            count: counts[c as usize],
                            percent_of_checks: percent(counts[c as usize], total_checks),
                        })
                        .collect(),
                    total_checks,
                    items_with_any,
                    percent_items_with_any: percent(items_with_any, by_item.len()),
                });
            }
        }
        metrics.push(report);
    }
    Ok(QualityReport {
        schema: schema.name.clone(),
        n_items: items.len(),
        n_annotators: annotators.len(),
        metrics,
    })
}
