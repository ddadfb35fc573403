//! Flat `key = value` settings files.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const KEYS: &[&str] = &[
    "alpha", "nbar", "r", "alpha0", "points", "from", "to", "out", "seed", "shots", "trials",
];

/// Parsed file contents, keyed by flag name without the leading dashes.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct FileSettings(BTreeMap<String, String>);

impl FileSettings {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key=value", k + 1);
            };
            let key = key.trim().trim_start_matches("--").to_string();
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key `{key}`", k + 1);
            }
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: duplicate key `{key}`", k + 1);
            }
        }
        Ok(Self(map))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

pub fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw.trim().parse().with_context(|| format!("`{key}` expects a decimal number, got `{raw}`"))?;
    if !v.is_finite() {
        bail!("`{key}` must be finite, got `{raw}`");
    }
    Ok(v)
}

pub fn parse_u64(key: &str, raw: &str) -> Result<u64> {
    raw.trim()
        .parse()
        .with_context(|| format!("`{key}` expects a nonnegative integer, got `{raw}`"))
}

pub fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(',').map(|item| parse_f64(key, item)).collect()
}
