//! Delimited (`.csv`, `.tsv`) and JSON-array inputs for the evaluation
//! commands. JSON is chosen by the `.json` extension; anything else is read
//! as CSV with a header row.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use easel_core::eval::{
    AnnotationRecord, AnnotationSchema, AnnotationValue, GoldLabel, GoldLabelSet, RaterTable,
};
use easel_core::retelling::{Condition, RetellingRecord};
use easel_core::SkillId;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path} row {row}: {message}")]
    Row { path: String, row: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

/// Reads every row of `path` into `T`.
pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, TableError> {
    let name = path.display().to_string();
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if ext.eq_ignore_ascii_case("json") {
        let text = std::fs::read_to_string(path).map_err(|source| TableError::Io { path: name.clone(), source })?;
        return serde_json::from_str(&text).map_err(|source| TableError::Json { path: name, source });
    }
    let delimiter = if ext.eq_ignore_ascii_case("tsv") { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::Headers)
        .from_path(path)
        .map_err(|source| TableError::Csv { path: name.clone(), source })?;
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|source| TableError::Csv { path: name, source })
}

/// One row of a gold-label or prediction file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRow {
    pub episode_id: String,
    pub skill_id: String,
    pub present: String,
    #[serde(default)]
    pub explanation: Option<String>,
}

pub fn parse_flag(text: &str) -> Option<bool> {
    match text.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// Labels keyed by (episode, skill), with empty explanations dropped.
pub type LabelMap = BTreeMap<(String, SkillId), GoldLabel>;

pub fn read_labels(path: &Path) -> Result<LabelMap, TableError> {
    let name = path.display().to_string();
    let rows: Vec<LabelRow> = read_rows(path)?;
    let mut out = BTreeMap::new();
    for (i, row) in rows.into_iter().enumerate() {
        let err = |message: String| TableError::Row { path: name.clone(), row: i + 1, message };
        let skill: SkillId = row.skill_id.parse().map_err(|e| err(format!("{e}")))?;
        let present = parse_flag(&row.present)
            .ok_or_else(|| err(format!("`present` must be 0/1, got `{}`", row.present)))?;
        let explanation = row.explanation.filter(|e| !e.trim().is_empty());
        let key = (row.episode_id.trim().to_string(), skill);
        if out.insert(key, GoldLabel { present, explanation }).is_some() {
            return Err(err(format!("duplicate label for {} {}", row.episode_id, skill)));
        }
    }
    Ok(out)
}

pub fn read_gold(path: &Path) -> Result<GoldLabelSet, TableError> {
    let labels = read_labels(path)?;
    GoldLabelSet::new(labels).map_err(|e| TableError::Invalid {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnotationRow {
    pub annotator_id: String,
    pub item_id: String,
    pub metric_id: String,
    #[serde(default)]
    pub value: String,
}

/// Reads annotations, interpreting each value by the kind its metric has in
/// `schema`.
pub fn read_annotations(path: &Path, schema: &AnnotationSchema) -> Result<Vec<AnnotationRecord>, TableError> {
    let name = path.display().to_string();
    let rows: Vec<AnnotationRow> = read_rows(path)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let err = |message: String| TableError::Row { path: name.clone(), row: i + 1, message };
            let metric = schema
                .metric(row.metric_id.trim())
                .ok_or_else(|| err(format!("unknown metric `{}`", row.metric_id)))?;
            let value = AnnotationValue::parse(metric.kind, &row.value).map_err(err)?;
            Ok(AnnotationRecord {
                annotator_id: row.annotator_id.trim().to_string(),
                item_id: row.item_id.trim().to_string(),
                metric_id: metric.id.clone(),
                value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetellingRow {
    pub child_id: String,
    pub condition: String,
    pub text: String,
}

pub fn read_retellings(path: &Path) -> Result<Vec<RetellingRecord>, TableError> {
    let name = path.display().to_string();
    let rows: Vec<RetellingRow> = read_rows(path)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let condition: Condition = row.condition.parse().map_err(|message| TableError::Row {
                path: name.clone(),
                row: i + 1,
                message,
            })?;
            Ok(RetellingRecord { child_id: row.child_id.trim().to_string(), condition, text: row.text })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatingRow {
    pub item_id: String,
    pub rater_id: String,
    #[serde(default)]
    pub value: Option<String>,
}

/// Long-format nominal ratings (`item_id, rater_id, value`) pivoted into a
/// table. Blank values and absent (item, rater) rows are missing ratings.
pub fn read_ratings(path: &Path) -> Result<RaterTable, TableError> {
    let name = path.display().to_string();
    let rows: Vec<RatingRow> = read_rows(path)?;
    let mut cells: BTreeMap<(String, String), Option<u32>> = BTreeMap::new();
    let mut items = BTreeSet::new();
    let mut raters = BTreeSet::new();
    for (i, row) in rows.into_iter().enumerate() {
        let err = |message: String| TableError::Row { path: name.clone(), row: i + 1, message };
        let value = match row.value.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(v) => Some(match parse_flag(v) {
                Some(b) => b as u32,
                None => v.parse::<u32>().map_err(|_| err(format!("rating `{v}` is not a category code")))?,
            }),
        };
        let (item, rater) = (row.item_id.trim().to_string(), row.rater_id.trim().to_string());
        items.insert(item.clone());
        raters.insert(rater.clone());
        if cells.insert((item, rater), value).is_some() {
            return Err(err("duplicate (item, rater) rating".into()));
        }
    }
    let items: Vec<String> = items.into_iter().collect();
    let raters: Vec<String> = raters.into_iter().collect();
    let values = items
        .iter()
        .map(|item| {
            raters
                .iter()
                .map(|rater| cells.get(&(item.clone(), rater.clone())).copied().flatten())
                .collect()
        })
        .collect();
    RaterTable::new(items, raters, values).map_err(|e| TableError::Invalid { path: name, message: e.to_string() })
}

/// Ratings of two label files side by side: each (episode, skill) is an item
/// and each file a rater. Pairs absent from one file are missing ratings.
pub fn rater_table_from_labels(a: &LabelMap, b: &LabelMap) -> Result<RaterTable, TableError> {
    let keys: BTreeSet<&(String, SkillId)> = a.keys().chain(b.keys()).collect();
    let items = keys.iter().map(|(e, s)| format!("{e}/{s}")).collect();
    let values = keys
        .iter()
        .map(|k| vec![a.get(*k).map(|l| l.present as u32), b.get(*k).map(|l| l.present as u32)])
        .collect();
    RaterTable::new(items, vec!["gold".into(), "pred".into()], values).map_err(|e| TableError::Invalid {
        path: "labels".into(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(ext: &str, body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn labels_csv_and_json_agree() {
        let csv = file(".csv", "episode_id,skill_id,present,explanation\ne1,A1,1,\"Toad is sad, then happy.\"\ne1,A2,0,\n");
        let json = file(
            ".json",
            r#"[{"episode_id":"e1","skill_id":"A1","present":"1","explanation":"Toad is sad, then happy."},
                {"episode_id":"e1","skill_id":"A2","present":"0"}]"#,
        );
        let a = read_labels(csv.path()).unwrap();
        assert_eq!(a, read_labels(json.path()).unwrap());
        assert_eq!(a[&("e1".into(), SkillId::A1)].explanation.as_deref(), Some("Toad is sad, then happy."));
        assert_eq!(a[&("e1".into(), SkillId::A2)].explanation, None);
    }

    #[test]
    fn bad_rows_are_located() {
        let f = file(".csv", "episode_id,skill_id,present,explanation\ne1,Z9,1,x\n");
        assert!(matches!(read_labels(f.path()), Err(TableError::Row { row: 1, .. })));
        let f = file(".csv", "episode_id,skill_id,present,explanation\ne1,A1,maybe,x\n");
        assert!(matches!(read_labels(f.path()), Err(TableError::Row { row: 1, .. })));
    }

    #[test]
    fn ratings_pivot_with_missing() {
        let f = file(".csv", "item_id,rater_id,value\ni1,r1,1\ni1,r2,1\ni2,r1,0\ni2,r2,\n");
        let t = read_ratings(f.path()).unwrap();
        assert_eq!(t.values, vec![vec![Some(1), Some(1)], vec![Some(0), None]]);
    }

    #[test]
    fn annotations_follow_schema_kinds() {
        let schema = easel_core::eval::child_activity_schema();
        let f = file(
            ".csv",
            "annotator_id,item_id,metric_id,value\na1,x,skill_relevance,Strongly agree\na1,x,not_yes_no,yes\na1,x,reflection,experience;feelings\n",
        );
        let recs = read_annotations(f.path(), &schema).unwrap();
        assert_eq!(recs[0].value, AnnotationValue::Likert(5));
        assert_eq!(recs[1].value, AnnotationValue::Binary(true));
        assert!(matches!(&recs[2].value, AnnotationValue::Checklist(s) if s.len() == 2));
    }
}
