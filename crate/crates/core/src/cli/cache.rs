//! On-disk JSON cache for exact results.
//!
//! Each entry is one file `<key>.json` holding `{version, key, data}`. A file
//! that does not parse, or carries another version or key, is recomputed and
//! overwritten.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bumped whenever a cached type changes its serialized form.
pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    version: u32,
    key: String,
    data: T,
}

/// How a [`Cache::get_or_compute`] call was served.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Missing,
    /// The file existed but was unreadable or stale.
    Replaced,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: Entry<T> = serde_json::from_str(&text)
            .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        if entry.version != CACHE_VERSION || entry.key != key {
            return Err(Error::Cache(format!(
                "{}: stamp (version {}, key {}) does not match (version {CACHE_VERSION}, key {key})",
                path.display(),
                entry.version,
                entry.key
            )));
        }
        Ok(Some(entry.data))
    }

    pub fn store<T: Serialize>(&self, key: &str, data: &T) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry { version: CACHE_VERSION, key: key.to_string(), data };
        // write then rename so a crash never leaves a half-written entry
        let tmp = self.dir.join(format!(".{key}.tmp"));
        fs::write(&tmp, serde_json::to_vec(&entry)?)?;
        fs::rename(&tmp, self.path(key))?;
        Ok(())
    }

    pub fn get_or_compute<T, F>(&self, key: &str, compute: F) -> Result<(T, Lookup)>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let how = match self.load(key) {
            Ok(Some(v)) => return Ok((v, Lookup::Hit)),
            Ok(None) => Lookup::Missing,
            Err(Error::Cache(_)) => Lookup::Replaced,
            Err(e) => return Err(e),
        };
        let v = compute()?;
        self.store(key, &v)?;
        Ok((v, how))
    }

    /// Keys of all entries, sorted.
    pub fn list(&self) -> Result<Vec<String>> {
        let mut keys = Vec::new();
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(keys),
            Err(e) => return Err(e.into()),
        };
        for ent in rd {
            let name = ent?.file_name().to_string_lossy().into_owned();
            if let Some(key) = name.strip_suffix(".json") {
                keys.push(key.to_string());
            }
        }
        keys.sort();
        Ok(keys)
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let keys = self.list()?;
        for k in &keys {
            fs::remove_file(self.path(k))?;
        }
        Ok(keys.len())
    }
}

pub fn modular_key(kappa: i64, p: i64) -> String {
    format!("modular-k{kappa}-p{p}")
}

/// `kappa = None` is the formal-`q` table.
pub fn macdonald_key(n: i64, k: i64, kappa: Option<i64>) -> String {
    match kappa {
        None => format!("macdonald-formal-n{n}-k{k}"),
        Some(kap) => format!("macdonald-k{kap}-n{n}-k{k}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macdonald::{macdonald_at_root, macdonald_via_shift, FormalQ};
    use crate::modular::{s_matrix, ModularData};
    use crate::qcore::QContext;

    #[test]
    fn modular_data_roundtrips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let ctx = QContext::new(8, 2).unwrap();
        let data = s_matrix(&ctx).unwrap();
        let key = modular_key(8, 2);
        let (a, how) = cache.get_or_compute(&key, || Ok(data.clone())).unwrap();
        assert_eq!(how, Lookup::Missing);
        let (b, how) = cache
            .get_or_compute::<ModularData, _>(&key, || panic!("must be served from disk"))
            .unwrap();
        assert_eq!(how, Lookup::Hit);
        assert_eq!(a, data);
        assert_eq!(b, data);
    }

    #[test]
    fn macdonald_tables_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let formal = macdonald_via_shift(&FormalQ, 4, 2).unwrap();
        cache.store(&macdonald_key(4, 2, None), &formal).unwrap();
        assert_eq!(cache.load(&macdonald_key(4, 2, None)).unwrap(), Some(formal));
        let ctx = QContext::level(7).unwrap();
        let root = macdonald_at_root(&ctx, 3, 1).unwrap();
        cache.store(&macdonald_key(3, 1, Some(7)), &root).unwrap();
        assert_eq!(cache.load(&macdonald_key(3, 1, Some(7))).unwrap(), Some(root));
        assert_eq!(cache.list().unwrap().len(), 2);
        assert_eq!(cache.clear().unwrap(), 2);
        assert!(cache.list().unwrap().is_empty());
    }

    #[test]
    fn corrupt_or_stale_entries_are_replaced() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = "value";
        fs::write(cache.path(key), "{ not json").unwrap();
        let (v, how) = cache.get_or_compute(key, || Ok(7i64)).unwrap();
        assert_eq!((v, how), (7, Lookup::Replaced));
        assert_eq!(cache.load::<i64>(key).unwrap(), Some(7));

        let stale = serde_json::json!({"version": CACHE_VERSION + 1, "key": key, "data": 1});
        fs::write(cache.path(key), stale.to_string()).unwrap();
        let (v, how) = cache.get_or_compute(key, || Ok(8i64)).unwrap();
        assert_eq!((v, how), (8, Lookup::Replaced));

        let (v, how) = cache.get_or_compute("absent", || Ok(9i64)).unwrap();
        assert_eq!((v, how), (9, Lookup::Missing));
    }
}
