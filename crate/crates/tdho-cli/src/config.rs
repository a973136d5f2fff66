//! Key-value run configuration: a flat `key = value` file (with `#`
//! comments) plus command-line `--set key=value` overrides.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use tdho::frequency::{self, Builtin};

#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!("{}:{}: expected `key = value`", path.display(), lineno + 1)
            })?;
            cfg.values
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(cfg)
    }

    pub fn apply_overrides(&mut self, sets: &[String]) -> Result<()> {
        for s in sets {
            let (key, value) = s
                .split_once('=')
                .ok_or_else(|| anyhow!("--set needs KEY=VALUE, got `{s}`"))?;
            self.values
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(())
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .with_context(|| format!("key `{key}`: bad number `{v}`")),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .with_context(|| format!("key `{key}`: bad integer `{v}`")),
        }
    }

    /// Comma-separated list of floats.
    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .with_context(|| format!("key `{key}`: bad number `{tok}`"))
                })
                .collect(),
        }
    }

    /// Build the frequency profile from the `profile.*` keys.
    pub fn profile(&self) -> Result<Builtin> {
        let kind = self
            .str("profile.kind")
            .ok_or_else(|| anyhow!("config needs `profile.kind` (constant|mathieu|tanh-ramp|bump-ramp|spline-ramp|step)"))?
            .to_string();
        let mut params: Vec<(&str, f64)> = Vec::new();
        for (k, v) in &self.values {
            if let Some(name) = k.strip_prefix("profile.") {
                if name != "kind" {
                    let value: f64 = v
                        .parse()
                        .with_context(|| format!("key `{k}`: bad number `{v}`"))?;
                    params.push((name, value));
                }
            }
        }
        frequency::builtin(&kind, &params).map_err(|e| anyhow!("invalid profile: {e}"))
    }
}
