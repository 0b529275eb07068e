//! Flat `key = value` configuration files.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Parses `key = value` text: one pair per line, `#` starts a comment,
/// blank lines are skipped, whitespace around keys and values is trimmed.
/// Later occurrences of a key override earlier ones.
pub fn parse_keyval(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::Config(format!(
                "line {}: expected key = value, got {:?}",
                idx + 1,
                raw.trim()
            )));
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", idx + 1)));
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}
