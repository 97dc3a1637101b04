//! Flat `key = value` run configuration.
//!
//! Lines starting with `#` and blank lines are ignored. Keys are lower-case
//! identifiers; values run to the end of the line and are trimmed. The
//! canonical form lists keys in sorted order, one `key = value` per line, and
//! parsing it back yields the same configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

fn check_key(key: &str) -> CliResult<()> {
    let ok = !key.is_empty()
        && key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !key.starts_with(|c: char| c.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(CliError::invalid(key, "keys are lower-case identifiers ([a-z_][a-z0-9_]*)"))
    }
}

fn check_value(key: &str, value: &str) -> CliResult<()> {
    if value.is_empty() {
        return Err(CliError::invalid(key, "empty value"));
    }
    if value.contains(['\n', '\r']) {
        return Err(CliError::invalid(key, "values are single-line"));
    }
    Ok(())
}

impl RunConfig {
    pub fn new() -> RunConfig {
        RunConfig::default()
    }

    pub fn parse(text: &str) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::invalid(
                    format!("line {}", i + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let key = k.trim();
            if cfg.entries.contains_key(key) {
                return Err(CliError::invalid(key, format!("duplicate key on line {}", i + 1)));
            }
            cfg.set(key, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        RunConfig::parse(&text)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_text()).map_err(|e| CliError::io(path, e))
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let (key, value) = (key.trim(), value.trim());
        check_key(key)?;
        check_value(key, value)?;
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> CliResult<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::invalid(assignment, "overrides take the form key=value"))?;
        self.set(k, v)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<K: AsRef<str>, V: AsRef<str>> FromIterator<(K, V)> for RunConfig {
    /// Panics on keys or values that [`RunConfig::set`] would reject.
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> RunConfig {
        let mut cfg = RunConfig::new();
        for (k, v) in iter {
            cfg.set(k.as_ref(), v.as_ref()).expect("valid config entry");
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_canonical_form() {
        let cfg = RunConfig::parse("# run\nn_max = 100\n\n  weight=liouville  \nalpha = p/q = 1/3\n").unwrap();
        assert_eq!(cfg.get("alpha"), Some("p/q = 1/3"));
        assert_eq!(cfg.to_text(), "alpha = p/q = 1/3\nn_max = 100\nweight = liouville\n");
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(RunConfig::parse("n_max 100").is_err());
        assert!(RunConfig::parse("a = 1\na = 2").is_err());
        assert!(RunConfig::parse("N = 1").is_err());
        assert!(RunConfig::parse("a =   ").is_err());
        let mut cfg = RunConfig::new();
        assert!(cfg.apply_override("seed").is_err());
        cfg.apply_override("seed=5").unwrap();
        cfg.apply_override("seed = 6").unwrap();
        assert_eq!(cfg.get("seed"), Some("6"));
    }
}
