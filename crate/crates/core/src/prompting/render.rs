use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{PromptError, PromptKind, RenderedPrompt, TemplateId, TemplateSet, Transcript};
use crate::digest::sha256_parts;
use crate::taxonomy::{ActivityType, SelSkill};

/// Substitutes `[NAME]` markers in a single left-to-right pass. Only names in
/// `bindings` are replaced; other bracketed text is copied through. Values
/// are never rescanned.
fn substitute(template: &str, bindings: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + 256);
    let mut rest = template;
    while let Some(open) = rest.find('[') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after.find(']').and_then(|close| {
            let name = &after[..close];
            bindings
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, value)| (close, *value))
        });
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('[');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// First declared placeholder still present in `text`, if any.
pub(crate) fn find_leak(text: &str, names: &[&str]) -> Option<String> {
    names.iter().find_map(|name| {
        let mut marker = String::with_capacity(name.len() + 2);
        marker.push('[');
        marker.push_str(name);
        marker.push(']');
        text.contains(marker.as_str()).then(|| name.to_string())
    })
}

fn finish(
    kind: PromptKind,
    template_id: TemplateId,
    template: &str,
    bindings: &[(&str, &str)],
) -> Result<RenderedPrompt, PromptError> {
    let text = substitute(template, bindings);
    if let Some(name) = find_leak(&text, template_id.placeholders()) {
        return Err(PromptError::PlaceholderLeak(name));
    }
    let mut parts: Vec<&str> = Vec::with_capacity(1 + bindings.len() * 2);
    parts.push(template_id.file_stem());
    for (name, value) in bindings {
        parts.push(name);
        parts.push(value);
    }
    Ok(RenderedPrompt {
        kind,
        template_id,
        text,
        inputs_digest: sha256_parts(parts),
    })
}

fn check_transcript(transcript: &Transcript) -> Result<(), PromptError> {
    if transcript.body.trim().is_empty() {
        Err(PromptError::EmptyTranscript)
    } else {
        Ok(())
    }
}

fn check_explanation(explanation: &str) -> Result<(), PromptError> {
    if explanation.trim().is_empty() {
        Err(PromptError::EmptyExplanation)
    } else {
        Ok(())
    }
}

pub fn render_detection_prompt(
    templates: &TemplateSet,
    skill: &SelSkill,
    transcript: &Transcript,
) -> Result<RenderedPrompt, PromptError> {
    check_transcript(transcript)?;
    finish(
        PromptKind::Detection,
        TemplateId::Detection,
        templates.get(TemplateId::Detection),
        &[
            ("SKILL", &skill.description),
            ("LACK_OF_SKILL", &skill.lack_description),
            ("SKILL_DEFINITION", &skill.definition),
            ("POSITIVE_EXAMPLE", &skill.positive_example),
            ("NEGATIVE_EXAMPLE", &skill.negative_example),
            ("TRANSCRIPT", &transcript.body),
        ],
    )
}

/// Activity-specific template followed by the shared suffix.
pub fn render_child_activity_prompt(
    templates: &TemplateSet,
    activity: ActivityType,
    transcript: &Transcript,
    skill: &SelSkill,
    explanation: &str,
) -> Result<RenderedPrompt, PromptError> {
    check_transcript(transcript)?;
    check_explanation(explanation)?;
    let id = TemplateId::for_activity(activity);
    let mut template = String::from(templates.get(id));
    template.push_str(templates.get(TemplateId::ChildSuffix));
    finish(
        PromptKind::ChildActivity,
        id,
        &template,
        &[
            ("TRANSCRIPT", &transcript.body),
            ("SKILL_DESCRIPTION", &skill.description),
            ("SKILL_EXPLANATION", explanation),
        ],
    )
}

pub fn render_parent_prompt(
    templates: &TemplateSet,
    transcript: &Transcript,
    skill: &SelSkill,
    explanation: &str,
) -> Result<RenderedPrompt, PromptError> {
    check_transcript(transcript)?;
    check_explanation(explanation)?;
    finish(
        PromptKind::ParentStarter,
        TemplateId::Parent,
        templates.get(TemplateId::Parent),
        &[
            ("TRANSCRIPT", &transcript.body),
            ("SKILL_DESCRIPTION", &skill.description),
            ("SKILL_EXPLANATION", explanation),
        ],
    )
}

pub fn render_summary_prompt(
    templates: &TemplateSet,
    transcript: &Transcript,
) -> Result<RenderedPrompt, PromptError> {
    check_transcript(transcript)?;
    finish(
        PromptKind::Summary,
        TemplateId::Summary,
        templates.get(TemplateId::Summary),
        &[("TRANSCRIPT", &transcript.body)],
    )
}
