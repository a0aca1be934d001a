//! `key = value` parameter files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Values read from a parameter file. Command-line flags take precedence.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`, got `{raw}`", n + 1)))?;
            let key = key.trim().to_string();
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("config line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { values })
    }

    /// Rejects keys the current command does not understand.
    pub fn check_keys(&self, valid: &[&str]) -> Result<(), CliError> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .map(String::as_str)
            .filter(|k| !valid.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "unknown config key(s) {}; valid keys: {}",
                unknown.join(", "),
                valid.join(", ")
            )))
        }
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: cannot parse `{v}`: {e}")))
            })
            .transpose()
    }

    /// The flag value if given, else the file value, else `default`.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    /// Like [`resolve`](Self::resolve) with no default.
    pub fn require<T>(&self, flag: Option<T>, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => self
                .get(key)?
                .ok_or_else(|| CliError::Usage(format!("missing required parameter `{key}` (flag --{key} or config key)"))),
        }
    }

    pub fn optional<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let c = ConfigFile::parse("# gate\nk = 2\n ratio=1.5   # trailing\n\n").unwrap();
        assert_eq!(c.get::<u32>("k").unwrap(), Some(2));
        assert_eq!(c.get::<f64>("ratio").unwrap(), Some(1.5));
        assert_eq!(c.resolve(Some(3u32), "k", 1).unwrap(), 3);
        assert_eq!(c.resolve(None, "m", 0u32).unwrap(), 0);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let c = ConfigFile::parse("k = 1\nspeed = 3").unwrap();
        let err = c.check_keys(&["k", "m"]).unwrap_err().to_string();
        assert!(err.contains("speed") && err.contains("valid keys: k, m"));
        assert!(ConfigFile::parse("k 1").is_err());
        assert!(ConfigFile::parse("k = 1\nk = 2").is_err());
        assert!(ConfigFile::parse("k = x").unwrap().get::<u32>("k").is_err());
    }
}
