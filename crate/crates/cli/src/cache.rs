//! Content-addressed result cache.
//!
//! A key is the SHA-256 of the canonical JSON of `{version, config}`; object
//! keys are sorted, so the hash does not depend on flag order. Entries are
//! written to a temporary file in the cache directory and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stable hash of a JSON value.
pub fn config_hash(config: &Value) -> String {
    // serde_json maps are ordered by key, so this is canonical.
    let text = serde_json::to_string(&serde_json::json!({ "version": VERSION, "config": config }))
        .expect("JSON values serialise");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    version: String,
    key: String,
    records: Vec<Value>,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Stats {
    pub hits: u64,
    pub misses: u64,
}

pub struct Cache {
    dir: Option<PathBuf>,
    pub stats: Stats,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self {
            dir,
            stats: Stats::default(),
        })
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// The stored records for `key`; a corrupt or stale entry is a miss.
    pub fn lookup(&mut self, key: &str) -> Option<Vec<Value>> {
        let path = self.path(key)?;
        let found = fs::read(&path)
            .ok()
            .and_then(|bytes| match serde_json::from_slice::<Entry>(&bytes) {
                Ok(e) if e.version == VERSION && e.key == key => Some(e.records),
                Ok(_) => None,
                Err(err) => {
                    eprintln!("warning: ignoring corrupt cache entry {}: {err}", path.display());
                    None
                }
            });
        match found {
            Some(_) => self.stats.hits += 1,
            None => self.stats.misses += 1,
        }
        found
    }

    pub fn store(&self, key: &str, records: &[Value]) -> Result<(), CliError> {
        let (Some(dir), Some(path)) = (&self.dir, self.path(key)) else {
            return Ok(());
        };
        let entry = Entry {
            version: VERSION.into(),
            key: key.into(),
            records: records.to_vec(),
        };
        write_atomic(dir, &path, &serde_json::to_vec(&entry)?)
    }

    /// Looks `config` up, computing and storing it on a miss.
    pub fn get_or_compute(
        &mut self,
        config: &Value,
        compute: impl FnOnce() -> Result<Vec<Value>, CliError>,
    ) -> Result<Vec<Value>, CliError> {
        let key = config_hash(config);
        if let Some(r) = self.lookup(&key) {
            return Ok(r);
        }
        let records = compute()?;
        self.store(&key, &records)?;
        Ok(records)
    }
}

fn write_atomic(dir: &Path, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
