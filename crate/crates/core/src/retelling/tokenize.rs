use alloc::string::String;
use alloc::vec::Vec;

/// Lowercases, splits on whitespace, and trims punctuation from both ends of
/// each token. Internal apostrophes and hyphens stay (`girl's`); curly
/// apostrophes are normalized to `'`.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let token = raw.trim_matches(|c: char| !c.is_alphanumeric());
            if token.is_empty() {
                return None;
            }
            Some(
                token
                    .chars()
                    .map(|c| if matches!(c, '’' | '‘') { '\'' } else { c })
                    .flat_map(char::to_lowercase)
                    .collect(),
            )
        })
        .collect()
}
