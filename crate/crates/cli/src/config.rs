//! Run configuration: a `key = value` file, overridden by flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::output::Format;

pub const DEFAULT_SEED: u64 = 2024;

/// Settings shared by every command. Everything that can change a result
/// is recorded in the output; the thread count is not, since it cannot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: DEFAULT_SEED, format: Format::Json, threads: None, cache_dir: None }
    }
}

/// Values read from a config file; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut pairs = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(format!("line {}: expected key = value", i + 1));
            };
            let v = v.trim().trim_matches('"');
            pairs.insert(k.trim().replace('-', "_"), (i + 1, v.to_string()));
        }
        let mut cfg = FileConfig::default();
        for (k, (line, v)) in pairs {
            let bad = |what: &str| format!("line {line}: {what} '{v}'");
            match k.as_str() {
                "seed" => cfg.seed = Some(parse_seed(&v).map_err(|_| bad("bad seed"))?),
                "format" => cfg.format = Some(Format::from_str(&v).map_err(|_| bad("bad format"))?),
                "threads" => cfg.threads = Some(v.parse().map_err(|_| bad("bad thread count"))?),
                "cache_dir" => cfg.cache_dir = Some(PathBuf::from(v)),
                _ => return Err(format!("line {line}: unknown key '{k}'")),
            }
        }
        Ok(cfg)
    }
}

/// Decimal or `0x` hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let r = match s.strip_prefix("0x") {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("bad seed '{s}': {e}"))
}
