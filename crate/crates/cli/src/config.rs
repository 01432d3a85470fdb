//! `key = value` experiment manifests. Keys mirror the long flags.

use std::collections::BTreeMap;
use std::fmt;

pub const KEYS: &[&str] = &["type", "J", "w", "field", "dmax-slack", "fmt", "out", "suite", "timings"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Blank lines and `#` comments are ignored; keys may appear once.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ConfigError { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| err(format!("expected key = value, got {body:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let key = key.strip_prefix("--").unwrap_or(key);
        if !KEYS.contains(&key) {
            return Err(err(format!("unknown key {key:?}")));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(err(format!("duplicate key {key:?}")));
        }
    }
    Ok(out)
}

/// `true`/`false`, `yes`/`no`, `1`/`0`.
pub fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}
