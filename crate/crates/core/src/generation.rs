//! Generated artifacts and the text normalization applied to raw model output.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::taxonomy::{ActivityType, SkillId};

/// A reflection activity for the child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChildActivity {
    pub episode_id: String,
    pub skill_id: SkillId,
    pub activity_type: ActivityType,
    pub prompt_text: String,
}

impl ChildActivity {
    /// Whether the text reminds the child of the episode before the
    /// activity itself, as in "In the video you just watched, ...".
    pub fn has_reminder(&self) -> bool {
        let lower = self.prompt_text.to_lowercase();
        let first_sentence = lower
            .split_terminator(['.', '!', '?'])
            .next()
            .unwrap_or("");
        ["video", "show", "episode", "story"]
            .iter()
            .any(|w| first_sentence.contains(w))
    }
}

/// A conversation starter for the parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentStarter {
    pub episode_id: String,
    pub skill_id: SkillId,
    pub prompt_text: String,
    /// Text that followed the first `Examples:` marker.
    pub examples_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode_id: String,
    pub summary_text: String,
}

const LABELS: [&str; 6] = [
    "activity:",
    "parent activity prompt:",
    "conversation starter:",
    "summary:",
    "prompt:",
    "response:",
];

const QUOTE_PAIRS: [(char, char); 4] = [('"', '"'), ('“', '”'), ('\'', '\''), ('‘', '’')];

fn strip_label(text: &str) -> &str {
    for label in LABELS {
        if text.len() >= label.len()
            && text.is_char_boundary(label.len())
            && text[..label.len()].eq_ignore_ascii_case(label)
        {
            return text[label.len()..].trim_start();
        }
    }
    text
}

fn strip_quotes(text: &str) -> &str {
    for (open, close) in QUOTE_PAIRS {
        if let Some(inner) = text.strip_prefix(open).and_then(|t| t.strip_suffix(close)) {
            // A lone quote character is not a quoted string.
            if !inner.is_empty() || text.chars().count() >= 2 {
                return inner.trim();
            }
        }
    }
    text
}

/// Trims a generation and removes a leading label and one pair of
/// surrounding quotes. Returns `None` when nothing is left.
pub fn normalize_generation(raw: &str) -> Option<String> {
    let text = strip_quotes(strip_label(raw.trim())).trim();
    let text = strip_label(text);
    if text.is_empty() {
        None
    } else {
        Some(text.to_string())
    }
}

/// Splits a parent starter at the first `Examples:` marker.
pub fn split_examples(text: &str) -> (String, Option<String>) {
    const MARKER: &str = "Examples:";
    match text.find(MARKER) {
        Some(at) => {
            let prompt = text[..at].trim();
            let examples = text[at + MARKER.len()..].trim();
            let prompt = strip_quotes(prompt).trim().to_string();
            let examples = strip_quotes(examples).trim();
            (
                prompt,
                (!examples.is_empty()).then(|| examples.to_string()),
            )
        }
        None => (text.trim().to_string(), None),
    }
}

/// Splits prose into sentences at `.`, `!` or `?` followed by whitespace or
/// the end of text. Closing quotes stay with their sentence.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, next)) = chars.peek() {
            if matches!(next, '.' | '!' | '?' | '"' | '”' | '’' | '\'') {
                end = j + next.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let at_boundary = chars.peek().is_none_or(|&(_, next)| next.is_whitespace());
        if at_boundary {
            let sentence = text[start..end].trim();
            if !sentence.is_empty() {
                out.push(sentence);
            }
            start = end;
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_curly_and_straight_quotes() {
        let raw = "“In the video you just watched, Frog took Toad’s ice cream. Draw a picture.”";
        assert_eq!(
            normalize_generation(raw).unwrap(),
            "In the video you just watched, Frog took Toad’s ice cream. Draw a picture."
        );
        assert_eq!(normalize_generation("\"Act it out.\"").unwrap(), "Act it out.");
        assert_eq!(normalize_generation("Activity: \"Act it out.\"").unwrap(), "Act it out.");
        assert_eq!(normalize_generation("  \n\t").as_deref(), None);
        assert_eq!(normalize_generation("\"\"").as_deref(), None);
    }

    #[test]
    fn inner_quotes_survive() {
        assert_eq!(
            normalize_generation("Say \"sorry\" to Toad").unwrap(),
            "Say \"sorry\" to Toad"
        );
    }

    #[test]
    fn examples_split_at_first_marker() {
        let (p, e) = split_examples("Tell your child.\n\n    Examples: one. Examples: two.");
        assert_eq!(p, "Tell your child.");
        assert_eq!(e.as_deref(), Some("one. Examples: two."));
        let (p, e) = split_examples("No marker here.");
        assert_eq!(p, "No marker here.");
        assert_eq!(e, None);
    }

    #[test]
    fn sentences() {
        assert_eq!(
            split_sentences("Frog took the ice cream. Toad was sad! Did they make up? Yes."),
            ["Frog took the ice cream.", "Toad was sad!", "Did they make up?", "Yes."]
        );
        assert_eq!(split_sentences("He said \"stop.\" Then left"), ["He said \"stop.\"", "Then left"]);
        assert_eq!(split_sentences("Version 2.5 is out."), ["Version 2.5 is out."]);
        assert!(split_sentences("  ").is_empty());
    }

    #[test]
    fn reminder_detection() {
        let a = ChildActivity {
            episode_id: "e".into(),
            skill_id: SkillId::S2,
            activity_type: ActivityType::Drawing,
            prompt_text: "In the video you just watched, Frog took Toad’s ice cream. Draw it.".into(),
        };
        assert!(a.has_reminder());
        let b = ChildActivity {
            prompt_text: "Draw a picture. The video was fun.".into(),
            ..a
        };
        assert!(!b.has_reminder());
    }
}
