//! On-disk caches: `counts.json` for point counts and fitted polynomials,
//! `kl_cache.json` for Kazhdan–Lusztig columns.
//!
//! Each file is an envelope `{schema_version, fingerprint, payload}` with
//! the SHA-256 of the serialized payload. A file that fails to parse, has
//! another schema version or a wrong fingerprint is ignored with a warning.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::poly::QPolynomial;
use crate::weyl::kl::{Column, KlTable};
use crate::weyl::Element;

pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "WITTGR_CACHE_DIR";
pub const COUNTS_FILE: &str = "counts.json";
pub const KL_FILE: &str = "kl_cache.json";

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema_version: u32,
    fingerprint: String,
    payload: T,
}

pub fn fingerprint<T: Serialize>(payload: &T) -> String {
    let bytes = serde_json::to_vec(payload).expect("cache payloads serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a cache file. A missing file gives the default silently; an
/// untrustworthy one gives the default and a warning.
pub fn load<T: DeserializeOwned + Serialize + Default>(path: &Path) -> (T, Option<String>) {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return (T::default(), None),
        Err(e) => return (T::default(), Some(format!("ignoring cache {}: {e}", path.display()))),
    };
    let warn = |why: &str| (T::default(), Some(format!("ignoring cache {}: {why}", path.display())));
    let env: Envelope<T> = match serde_json::from_str(&text) {
        Ok(e) => e,
        Err(e) => return warn(&format!("unreadable ({e})")),
    };
    if env.schema_version != SCHEMA_VERSION {
        return warn(&format!("schema version {} (expected {SCHEMA_VERSION})", env.schema_version));
    }
    if env.fingerprint != fingerprint(&env.payload) {
        return warn("fingerprint mismatch");
    }
    (env.payload, None)
}

/// Writes a cache file through a temporary file and a rename.
pub fn store<T: Serialize>(path: &Path, payload: &T) -> Result<()> {
    let env = Envelope { schema_version: SCHEMA_VERSION, fingerprint: fingerprint(payload), payload };
    let text = serde_json::to_string_pretty(&env).map_err(|e| Error::Io(e.to_string()))?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Cache directory from the environment, if set.
pub fn dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Counts and fitted polynomials keyed by a canonical query string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsCache {
    pub counts: BTreeMap<String, u64>,
    pub polynomials: BTreeMap<String, Vec<i64>>,
}

impl CountsCache {
    pub fn count(&self, key: &str) -> Option<u64> {
        self.counts.get(key).copied()
    }

    pub fn polynomial(&self, key: &str) -> Option<QPolynomial> {
        self.polynomials.get(key).map(|c| QPolynomial::from_coeffs(c.clone()))
    }

    pub fn insert_count(&mut self, key: String, value: u64) {
        self.counts.insert(key, value);
    }

    pub fn insert_polynomial(&mut self, key: String, p: &QPolynomial) {
        self.polynomials.insert(key, p.to_coeffs());
    }
}

/// One KL column: `w` and the pairs `(y, P_{y,w})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnRecord {
    pub w: Vec<i64>,
    pub entries: Vec<(Vec<i64>, Vec<i64>)>,
}

/// KL columns per group name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlCache {
    pub groups: BTreeMap<String, Vec<ColumnRecord>>,
}

impl KlCache {
    /// Seeds a table with the cached columns of its group.
    pub fn seed(&self, table: &mut KlTable) -> usize {
        let Some(cols) = self.groups.get(table.group().name()) else {
            return 0;
        };
        for rec in cols {
            let col: Column =
                rec.entries.iter().map(|(y, c)| (Element(y.clone()), QPolynomial::from_coeffs(c.clone()))).collect();
            table.insert_column(Element(rec.w.clone()), col);
        }
        cols.len()
    }

    /// Replaces the cached columns of the table's group with all of its columns.
    pub fn absorb(&mut self, table: &KlTable) {
        let mut cols: Vec<ColumnRecord> = table
            .columns()
            .map(|(w, col)| {
                let mut entries: Vec<(Vec<i64>, Vec<i64>)> =
                    col.iter().map(|(y, p)| (y.raw().to_vec(), p.to_coeffs())).collect();
                entries.sort();
                ColumnRecord { w: w.raw().to_vec(), entries }
            })
            .collect();
        cols.sort_by(|a, b| a.w.cmp(&b.w));
        self.groups.insert(table.group().name().to_string(), cols);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::CoxeterGroup;

    fn tempdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("wittgr-cache-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempdir("counts");
        let path = dir.join(COUNTS_FILE);
        let (empty, warn) = load::<CountsCache>(&path);
        assert!(empty.counts.is_empty() && warn.is_none());
        let mut c = CountsCache::default();
        c.insert_count("cell:mixed:q=5:(1,0)".into(), 6);
        c.insert_polynomial("cell:mixed:(2,0)".into(), &QPolynomial::from_coeffs(vec![0, 1, 1]));
        store(&path, &c).unwrap();
        let (back, warn) = load::<CountsCache>(&path);
        assert_eq!(back, c);
        assert!(warn.is_none());

        let text = fs::read_to_string(&path).unwrap().replace("\"cell:mixed:q=5:(1,0)\": 6", "\"cell:mixed:q=5:(1,0)\": 7");
        fs::write(&path, text).unwrap();
        let (back, warn) = load::<CountsCache>(&path);
        assert!(back.counts.is_empty());
        assert!(warn.unwrap().contains("fingerprint"));

        fs::write(&path, "{not json").unwrap();
        assert!(load::<CountsCache>(&path).1.unwrap().contains("unreadable"));
        let stale = serde_json::json!({"schema_version": 0, "fingerprint": fingerprint(&c), "payload": c});
        fs::write(&path, stale.to_string()).unwrap();
        assert!(load::<CountsCache>(&path).1.unwrap().contains("schema version"));
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn kl_columns_survive_a_round_trip() {
        let g = CoxeterGroup::affine_gl(3);
        let w = g.from_word(&[0, 1, 2, 0, 1, 2]).unwrap();
        let mut t = KlTable::new(g.clone());
        t.column(&w).unwrap();
        let mut cache = KlCache::default();
        cache.absorb(&t);
        let dir = tempdir("kl");
        let path = dir.join(KL_FILE);
        store(&path, &cache).unwrap();
        let (back, warn) = load::<KlCache>(&path);
        assert!(warn.is_none());
        let mut fresh = KlTable::new(g.clone());
        assert_eq!(back.seed(&mut fresh), t.len());
        // a longer element reuses the seeded columns
        let w2 = g.from_word(&[0, 1, 2, 0, 1, 2, 0]).unwrap();
        let mut cold = KlTable::new(g);
        assert_eq!(fresh.column(&w2).unwrap(), cold.column(&w2).unwrap());
        assert_eq!(fresh.entries(), cold.entries());
        fs::remove_dir_all(dir).unwrap();
    }
}
