//! Content-addressed store for ED results.
//!
//! Entries are named by the SHA-256 of the model parameters, the sorted
//! inhomogeneities, the tolerance block and the crate version. Writes go to a
//! temporary file in the cache directory and are renamed into place, so a
//! reader never sees a partial entry and parallel sweeps never share a path.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use xxz_roots::spectra::DEFAULT_PROBE;
use xxz_roots::ModelParams;

use crate::error::{CliError, Result};

/// Tolerances that change the content of a cached spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub probe: [f64; 2],
    pub pair_tol: f64,
}

impl Tolerances {
    pub fn new(pair_tol: f64) -> Self {
        Self {
            probe: [DEFAULT_PROBE.re, DEFAULT_PROBE.im],
            pair_tol,
        }
    }
}

#[derive(Serialize)]
struct KeyDoc<'a> {
    kind: &'a str,
    n: usize,
    eta: [f64; 2],
    thetas: Vec<f64>,
    tolerances: Tolerances,
    version: &'a str,
}

/// Hex SHA-256 cache key.
pub fn cache_key(kind: &str, params: &ModelParams, tol: Tolerances) -> String {
    let mut thetas: Vec<f64> = params.thetas().iter().map(|t| t.im).collect();
    thetas.sort_by(f64::total_cmp);
    let doc = KeyDoc {
        kind,
        n: params.n_sites(),
        eta: [params.eta().re, params.eta().im],
        thetas,
        tolerances: tol,
        version: xxz_roots::VERSION,
    };
    let bytes = serde_json::to_vec(&doc).expect("key document serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir: Some(dir) }
    }

    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn load(&self, key: &str) -> Option<String> {
        let path = self.path(key)?;
        match std::fs::read_to_string(&path) {
            Ok(text) => Some(text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => {
                log::warn!("unreadable cache entry {}: {e}", path.display());
                None
            }
        }
    }

    pub fn store(&self, key: &str, text: &str) -> Result<()> {
        match self.path(key) {
            Some(path) => write_atomic(&path, text.as_bytes()),
            None => Ok(()),
        }
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(CliError::io(&dir))?;
    tmp.write_all(bytes).map_err(CliError::io(tmp.path()))?;
    tmp.as_file().sync_all().map_err(CliError::io(tmp.path()))?;
    tmp.persist(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}
