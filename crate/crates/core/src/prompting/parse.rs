use alloc::string::{String, ToString};

use thiserror::Error;

use crate::detection::DetectionOutcome;
use crate::taxonomy::SkillId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unparseable detection response for {skill}: {reason}")]
    UnparseableResponse { skill: SkillId, reason: &'static str },
}

/// Removes one surrounding markdown code fence, if the text is fenced.
fn strip_fence(text: &str) -> &str {
    let Some(inner) = text.strip_prefix("```") else {
        return text;
    };
    let Some(inner) = inner.trim_end().strip_suffix("```") else {
        return text;
    };
    // Drop an info string such as ```text on the opening line.
    match inner.find('\n') {
        Some(nl) if inner[..nl].trim().chars().all(|c| c.is_ascii_alphabetic()) => &inner[nl + 1..],
        _ => inner,
    }
}

fn strip_label(text: &str) -> &str {
    const LABEL: &str = "skill:";
    if text.len() >= LABEL.len()
        && text.is_char_boundary(LABEL.len())
        && text[..LABEL.len()].eq_ignore_ascii_case(LABEL)
    {
        text[LABEL.len()..].trim_start()
    } else {
        text
    }
}

/// Parses a `0` / `1, explanation` detection answer.
///
/// Tolerates surrounding whitespace, one markdown fence, and a leading
/// `Skill:` label. The explanation is everything after the first comma.
pub fn parse_detection_response(raw: &str, skill: SkillId) -> Result<DetectionOutcome, ParseError> {
    let fail = |reason| ParseError::UnparseableResponse { skill, reason };
    let text = strip_label(strip_fence(raw.trim()).trim());
    if text.is_empty() {
        return Err(fail("empty response"));
    }
    let token_end = text
        .find(|c: char| c == ',' || c.is_whitespace())
        .unwrap_or(text.len());
    match &text[..token_end] {
        "0" => Ok(DetectionOutcome {
            skill_id: skill,
            present: false,
            explanation: None,
            raw_response: raw.to_string(),
            diagnostic: None,
        }),
        "1" => {
            let rest = &text[token_end..];
            let comma = rest
                .find(',')
                .ok_or_else(|| fail("rating 1 without a comma-separated explanation"))?;
            // Only whitespace may sit between the rating and its comma.
            if !rest[..comma].trim().is_empty() {
                return Err(fail("text between rating and comma"));
            }
            let explanation = rest[comma + 1..].trim();
            if explanation.is_empty() {
                return Err(fail("rating 1 with an empty explanation"));
            }
            Ok(DetectionOutcome {
                skill_id: skill,
                present: true,
                explanation: Some(explanation.to_string()),
                raw_response: raw.to_string(),
                diagnostic: None,
            })
        }
        _ => Err(fail("first token is neither 0 nor 1")),
    }
}

impl DetectionOutcome {
    /// `0` or `1, <explanation>`.
    pub fn canonical_response(&self) -> String {
        match (&self.present, &self.explanation) {
            (true, Some(e)) => {
                let mut s = String::from("1, ");
                s.push_str(e);
                s
            }
            _ => "0".to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(raw: &str) -> DetectionOutcome {
        parse_detection_response(raw, SkillId::A1).unwrap()
    }

    #[test]
    fn zero_is_absent() {
        let o = parse_detection_response("0", SkillId::R1).unwrap();
        assert!(!o.present);
        assert_eq!(o.explanation, None);
        assert_eq!(o.skill_id, SkillId::R1);
    }

    #[test]
    fn one_with_explanation() {
        let o = parse_detection_response(
            "1, Froggy offers to help Moo Moo get out of the forest.",
            SkillId::R2,
        )
        .unwrap();
        assert!(o.present);
        assert_eq!(
            o.explanation.as_deref(),
            Some("Froggy offers to help Moo Moo get out of the forest.")
        );
    }

    #[test]
    fn splits_on_first_comma_only() {
        let o = ok("1, First, Frog steals, then apologizes.");
        assert_eq!(o.explanation.as_deref(), Some("First, Frog steals, then apologizes."));
        let o = ok("1 ,spaced");
        assert_eq!(o.explanation.as_deref(), Some("spaced"));
    }

    #[test]
    fn chrome_is_tolerated() {
        assert!(!ok("  \n0\n").present);
        assert!(!ok("```\n0\n```").present);
        assert!(ok("```text\n1, Toad shares.\n```").present);
        assert!(ok("Skill: 1, Toad shares.").present);
        assert!(ok("```\nskill: 1, Toad shares.\n```").present);
        assert!(!ok("0, not present").present);
        assert_eq!(ok("0, not present").explanation, None);
    }

    #[test]
    fn malformed_is_rejected() {
        for raw in ["maybe", "", "   ", "1", "1,", "1, ", "10", "01", "1. Frog", "1 Frog, helps", "yes, Frog", "**1**, Frog", "Rating: 1, Frog"] {
            assert!(
                parse_detection_response(raw, SkillId::A1).is_err(),
                "{raw:?} should be rejected"
            );
        }
    }

    #[test]
    fn raw_is_preserved() {
        let raw = "```\n1, x\n```";
        assert_eq!(ok(raw).raw_response, raw);
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        for raw in ["0", "1, a, b", "Skill: 1,  spaced  out ", "```\n0\n```"] {
            let first = ok(raw);
            let again = ok(&first.canonical_response());
            assert_eq!(first.present, again.present);
            assert_eq!(first.explanation, again.explanation);
            assert_eq!(again.canonical_response(), first.canonical_response());
        }
    }
}
