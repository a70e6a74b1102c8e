//! `key = value` run-configuration files.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Keys are the long flag names (`nu`, `d-over-l`, ...). Values supplied on
//! the command line take precedence over the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use super::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "alignment",
    "alignments",
    "nu",
    "l",
    "d",
    "gap",
    "axis",
    "lo",
    "hi",
    "n",
    "spacing",
    "d-over-l",
    "d-hi",
    "grid-n",
    "tol",
    "objective",
    "profile",
    "format",
    "out",
    "threads",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {line_no}: expected `key = value`")))?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {line_no}: unknown key `{key}`")));
            }
            let value = value.trim();
            if value.is_empty() {
                return Err(CliError::Usage(format!("config line {line_no}: key `{key}` has no value")));
            }
            if entries.insert(key.clone(), (value.to_string(), line_no)).is_some() {
                return Err(CliError::Usage(format!("config line {line_no}: key `{key}` repeated")));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(KNOWN_KEYS.contains(&key), "{key}");
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get_with(key, |s| s.parse::<T>().map_err(|e| e.to_string()))
    }

    pub fn get_with<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        debug_assert!(KNOWN_KEYS.contains(&key), "{key}");
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => parse(v)
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config line {line}: key `{key}`: {e}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let c = ConfigFile::parse("# run\nnu = 3   # cone\n\nd_over_l=2.5\n").unwrap();
        assert_eq!(c.get::<f64>("nu").unwrap(), Some(3.0));
        assert_eq!(c.get::<f64>("d-over-l").unwrap(), Some(2.5));
        assert_eq!(c.get::<f64>("gap").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        for bad in ["colour = red", "nu 3", "nu =", "nu = 1\nnu = 2"] {
            assert!(matches!(ConfigFile::parse(bad), Err(CliError::Usage(_))), "{bad}");
        }
        let c = ConfigFile::parse("nu = three").unwrap();
        let err = c.get::<f64>("nu").unwrap_err();
        assert!(err.to_string().contains("`nu`"));
    }
}
