mod common;

use std::path::Path;
use std::process::Command;

use common::*;

fn easel(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_easel"))
        .args(args)
        .env_remove("EASEL_PROVIDER_KEY")
        .output()
        .unwrap();
    assert!(out.status.success(), "easel {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_reproduces_the_golden_output() {
    let config = fixture("easel.toml");
    let transcript = fixture("frog_toad.json");
    let out = easel(&["generate", "--config", p(&config), "--transcript", p(&transcript)]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), read_fixture("golden_output.json"));
}

#[test]
fn detect_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let (config, transcript, script) = (fixture("easel.toml"), fixture("frog_toad.json"), fixture("frog_toad_script.json"));
    easel(&["detect", "--config", p(&config), "--transcript", p(&transcript), "--mock", p(&script), "--out", p(&target)]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let present: Vec<&str> = report["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|o| o["present"] == true)
        .map(|o| o["skill_id"].as_str().unwrap())
        .collect();
    assert_eq!(present, ["S1", "R2"]);
}

#[test]
fn plain_text_transcripts_take_their_id_from_the_file_name() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("pond-day.txt");
    std::fs::write(&txt, transcript().body).unwrap();
    let config = fixture("easel.toml");
    let out = easel(&["detect", "--config", p(&config), "--transcript", p(&txt)]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["episode_id"], "pond-day");
}

#[test]
fn eval_scores_labels_and_annotations() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold.csv");
    let pred = dir.path().join("pred.csv");
    let mut g = String::from("episode_id,skill_id,present,explanation\n");
    let mut q = g.clone();
    for (i, id) in ["A1", "A2", "M1", "M2", "S1", "S2", "S3", "R1", "R2", "D1"].iter().enumerate() {
        let gp = i % 3 == 0;
        let pp = i % 2 == 0;
        g.push_str(&format!("ep1,{id},{},{}\n", gp as u8, if gp { "Toad is sad" } else { "" }));
        q.push_str(&format!("ep1,{id},{},{}\n", pp as u8, if pp { "Toad is sad" } else { "" }));
    }
    std::fs::write(&gold, g).unwrap();
    std::fs::write(&pred, q).unwrap();
    let target = dir.path().join("eval.json");
    let annotations = fixture("annotations_5x59.csv");
    easel(&["eval", "--gold", p(&gold), "--pred", p(&pred), "--out", p(&target), "--annotations", p(&annotations)]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    // gold positives at 0,3,6,9; predicted at 0,2,4,6,8
    assert_eq!(report["detection"]["overall"]["true_positive"], 2);
    assert_eq!(report["detection"]["overall"]["false_positive"], 3);
    assert_eq!(report["detection"]["overall"]["false_negative"], 2);
    assert_eq!(report["explanation_pairs"], 2);
    let mean = report["explanation_similarity"]["mean"].as_f64().unwrap();
    assert!((mean - 1.0).abs() < 1e-12);
    assert_eq!(report["annotations"]["n_items"], 59);
}

#[test]
fn retell_stats_uses_the_bundled_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("retellings.csv");
    let mut csv = String::from("child_id,condition,text\n");
    csv.push_str("c1,no_activity,Frog took the ice cream and ran\n");
    csv.push_str("c1,easel_activity,Toad was sad and Frog felt sorry\n");
    csv.push_str("c2,no_activity,They ate ice cream by the pond\n");
    csv.push_str("c2,easel_activity,Frog was kind and they were happy\n");
    std::fs::write(&data, csv).unwrap();
    let out = easel(&["retell-stats", "--data", p(&data)]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let categories = report["categories"].as_array().unwrap();
    assert_eq!(categories.len(), 3);
    assert_eq!(categories[0]["n_pairs"], 2);
    assert!(categories[0]["cliffs_delta"].as_f64().unwrap() > 0.0);
}

#[test]
fn retell_stats_zero_handling_is_selectable() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("retellings.csv");
    let mut csv = String::from("child_id,condition,text\n");
    csv.push_str("c1,no_activity,Frog took the ice cream\n");
    csv.push_str("c1,easel_activity,Toad was sad and sorry\n");
    csv.push_str("c2,no_activity,They ate by the pond\n");
    csv.push_str("c2,easel_activity,Frog was kind and happy\n");
    csv.push_str("c3,no_activity,they ran home\n");
    csv.push_str("c3,easel_activity,they ran home\n");
    std::fs::write(&data, csv).unwrap();
    let affect = |zeros: &str| {
        let out = easel(&["retell-stats", "--data", p(&data), "--zeros", zeros]);
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        report["categories"][0]["wilcoxon"]["Ok"].clone()
    };
    let discard = affect("discard");
    assert_eq!((discard["w_plus"].as_f64(), discard["n_zero"].as_u64()), (Some(3.0), Some(1)));
    let pratt = affect("pratt");
    assert_eq!(pratt["zero_handling"], "pratt");
    // the zero pair takes rank 1, pushing the others to 2 and 3
    assert_eq!(pratt["w_plus"].as_f64(), Some(5.0));

    let bad = Command::new(env!("CARGO_BIN_EXE_easel"))
        .args(["retell-stats", "--data", p(&data), "--zeros", "wilcox"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
