//! `key = value` experiment files. Keys are the long flag names without
//! the leading dashes; `#` starts a comment.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

pub const KEYS: &[&str] = &[
    "grid-start",
    "grid-stop",
    "grid-count",
    "spacing",
    "seed",
    "samples",
    "format",
    "out",
    "placement",
    "gamma",
    "lambda",
    "omega",
    "intensity",
    "input",
    "ec-after-both",
];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(format!("line {}: unknown key '{k}'", n + 1));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(format!("line {}: duplicate key '{k}'", n + 1));
            }
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        debug_assert!(KEYS.contains(&key), "unregistered key {key}");
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| format!("config key '{key}': {e}")))
            .transpose()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_and_comments() {
        let c = FileConfig::parse("# sweep\ngrid-count = 5\nspacing=linear  # override\n\n").unwrap();
        assert_eq!(c.get::<usize>("grid-count").unwrap(), Some(5));
        assert_eq!(c.raw("spacing"), Some("linear"));
        assert_eq!(c.get::<f64>("gamma").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(FileConfig::parse("grid-count 5").is_err());
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("seed = 1\nseed = 2").is_err());
        let c = FileConfig::parse("seed = x").unwrap();
        assert!(c.get::<u64>("seed").is_err());
    }
}
