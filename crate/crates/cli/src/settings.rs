//! Parameter resolution: built-in default, then config file, then flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use conetx::io::{parse_key_values, KeyValues};

/// Merged parameters plus the resolved values actually used, which are
/// written out as `run.cfg`.
pub struct Settings {
    given: KeyValues,
    used: KeyValues,
}

impl Settings {
    pub fn load(config: Option<&Path>, flags: KeyValues) -> Result<Self> {
        let mut given = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                parse_key_values(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => KeyValues::new(),
        };
        given.merge(&flags);
        Ok(Self {
            given,
            used: KeyValues::new(),
        })
    }

    pub fn get<T: FromStr + ToString>(&mut self, key: &str, default: T) -> Result<T> {
        let v = self.given.parse::<T>(key)?.unwrap_or(default);
        self.used.set(key, v.to_string());
        Ok(v)
    }

    pub fn optional<T: FromStr + ToString>(&mut self, key: &str) -> Result<Option<T>> {
        let v = self.given.parse::<T>(key)?;
        if let Some(v) = &v {
            self.used.set(key, v.to_string());
        }
        Ok(v)
    }

    pub fn path(&mut self, key: &str) -> Option<PathBuf> {
        let v = self.given.get(key).map(PathBuf::from);
        if let Some(p) = &v {
            self.used.set(key, p.display());
        }
        v
    }

    pub fn required_path(&mut self, key: &str) -> Result<PathBuf> {
        self.path(key)
            .with_context(|| format!("missing required parameter `{key}`"))
    }

    /// Keys supplied but never consumed are reported as errors, so typos do
    /// not silently fall back to defaults.
    pub fn finish(self, out: &Path) -> Result<()> {
        let unused: Vec<&str> = self
            .given
            .iter()
            .map(|(k, _)| k)
            .filter(|k| self.used.get(k).is_none())
            .collect();
        if !unused.is_empty() {
            anyhow::bail!("unknown parameters: {}", unused.join(", "));
        }
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        std::fs::write(out.join("run.cfg"), self.used.to_string())?;
        Ok(())
    }
}

/// Builds a key-value set from the flags that were actually given.
#[derive(Default)]
pub struct FlagSet(pub KeyValues);

impl FlagSet {
    pub fn put<T: ToString>(&mut self, key: &str, v: &Option<T>) -> &mut Self {
        if let Some(v) = v {
            self.0.set(key, v.to_string());
        }
        self
    }

    pub fn put_path(&mut self, key: &str, v: &Option<PathBuf>) -> &mut Self {
        if let Some(v) = v {
            self.0.set(key, v.display());
        }
        self
    }
}

/// `x,y` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub [f64; 2]);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Self([parse(a)?, parse(b)?]))
    }
}

impl std::fmt::Display for Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.0[0], self.0[1])
    }
}
