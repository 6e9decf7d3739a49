use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::format_err;
use crate::phantom::{Disk, GaussianBlob, Phantom};
use crate::Result;

/// Parses one shape per line:
///
/// ```text
/// # comment
/// disk  cx cy radius density
/// gauss cx cy sigma amplitude
/// ```
pub fn parse_phantom(text: &str) -> Result<Phantom> {
    let mut phantom = Phantom::empty();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let kind = fields.next().unwrap_or_default();
        let nums: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| format_err(format!("line {}: bad number {f:?}", i + 1)))
            })
            .collect::<Result<_>>()?;
        if nums.len() != 4 {
            return Err(format_err(format!(
                "line {}: expected 4 numbers after {kind:?}, got {}",
                i + 1,
                nums.len()
            )));
        }
        let center = [nums[0], nums[1]];
        let at_line = |e| format_err(format!("line {}: {e}", i + 1));
        match kind {
            "disk" => phantom
                .disks
                .push(Disk::new(center, nums[2], nums[3]).map_err(at_line)?),
            "gauss" => phantom
                .blobs
                .push(GaussianBlob::new(center, nums[2], nums[3]).map_err(at_line)?),
            other => {
                return Err(format_err(format!(
                    "line {}: unknown shape {other:?}",
                    i + 1
                )))
            }
        }
    }
    Ok(phantom)
}

/// Inverse of [`parse_phantom`]; numbers use the shortest round-trip form.
pub fn format_phantom(p: &Phantom) -> String {
    let mut out = String::new();
    for d in &p.disks {
        out += &format!(
            "disk {} {} {} {}\n",
            d.center[0], d.center[1], d.radius, d.density
        );
    }
    for g in &p.blobs {
        out += &format!(
            "gauss {} {} {} {}\n",
            g.center[0], g.center[1], g.sigma, g.amplitude
        );
    }
    out
}

/// `key = value` pairs, kept sorted so that printing is deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Parsed value of `key`, `None` when absent.
    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| format_err(format!("bad value {v:?} for {key}")))
            })
            .transpose()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.insert(key.into(), value.to_string());
    }

    /// Entries of `other` replace those already present.
    pub fn merge(&mut self, other: &KeyValues) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl fmt::Display for KeyValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Blank lines and `#` comments are skipped; a repeated key keeps the last value.
pub fn parse_key_values(text: &str) -> Result<KeyValues> {
    let mut kv = KeyValues::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format_err(format!("line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(format_err(format!("line {}: empty key", i + 1)));
        }
        kv.set(k, v.trim());
    }
    Ok(kv)
}
