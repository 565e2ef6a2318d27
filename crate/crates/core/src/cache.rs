//! On-disk cache for relation tables.
//!
//! The directory is taken from an explicit argument, then the `CLG_CACHE`
//! environment variable, then `.clg-cache` in the working directory.
//!
//! Entry layout: one header line
//! `CLGCACHE <version> <kind> <n> <q> <k> <len> <sha256-hex>`, then `len`
//! payload bytes. A wrong version, key, length or checksum means the entry
//! is rebuilt.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactmath::SchemeParams;
use crate::format::write_atomic;
use crate::projspace::GeometryCtx;
use crate::scheme::RelationTable;

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "CLG_CACHE";
pub const DEFAULT_CACHE_DIR: &str = ".clg-cache";

pub fn resolve_cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_CACHE_DIR),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    /// Built because the entry was missing.
    Built,
    /// Built because the stored entry was stale or corrupt.
    Rebuilt,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, kind: &str, p: &SchemeParams) -> PathBuf {
        self.dir.join(format!("{kind}-n{}-q{}-k{}.bin", p.n, p.q, p.k))
    }

    fn header(kind: &str, p: &SchemeParams, payload: &[u8]) -> String {
        let digest = hex(&Sha256::digest(payload));
        format!("CLGCACHE {CACHE_VERSION} {kind} {} {} {} {} {digest}\n", p.n, p.q, p.k, payload.len())
    }

    /// Payload of a valid entry, or a description of what is wrong.
    fn load(&self, kind: &str, p: &SchemeParams) -> Result<Option<Vec<u8>>> {
        let path = self.path(kind, p);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Cache("missing header".into()))?;
        let payload = &bytes[nl + 1..];
        let header = std::str::from_utf8(&bytes[..=nl]).map_err(|_| Error::Cache("bad header".into()))?;
        if header != Self::header(kind, p, payload) {
            return Err(Error::Cache(format!("stale or corrupt entry {}", path.display())));
        }
        Ok(Some(payload.to_vec()))
    }

    fn store(&self, kind: &str, p: &SchemeParams, payload: &[u8]) -> Result<()> {
        let mut bytes = Self::header(kind, p, payload).into_bytes();
        bytes.extend_from_slice(payload);
        write_atomic(&self.path(kind, p), &bytes)
    }

    /// Relation table for `ctx`, from disk when a valid entry exists.
    pub fn relations(&self, ctx: &GeometryCtx) -> Result<(RelationTable, CacheStatus)> {
        let p = ctx.params();
        let classes = p.k as u8 + 2;
        let status = match self.load("relations", p) {
            Ok(Some(payload)) => {
                if let Ok(t) = RelationTable::from_raw(ctx.num_kspaces(), classes, payload) {
                    return Ok((t, CacheStatus::Hit));
                }
                CacheStatus::Rebuilt
            }
            Ok(None) => CacheStatus::Built,
            Err(Error::Cache(_)) => CacheStatus::Rebuilt,
            Err(e) => return Err(e),
        };
        let table = RelationTable::build(ctx);
        self.store("relations", p, table.raw())?;
        Ok((table, status))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cold_then_warm_then_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let ctx = GeometryCtx::enumerate(SchemeParams::new(3, 1, 2).unwrap()).unwrap();
        let (cold, s1) = cache.relations(&ctx).unwrap();
        let (warm, s2) = cache.relations(&ctx).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Built, CacheStatus::Hit));
        assert_eq!(cold, warm);
        let path = cache.path("relations", ctx.params());
        let mut bytes = std::fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 1;
        std::fs::write(&path, &bytes).unwrap();
        let (again, s3) = cache.relations(&ctx).unwrap();
        assert_eq!((s3, again), (CacheStatus::Rebuilt, cold));
        std::fs::write(&path, "CLGCACHE 0 relations 3 2 1 0 x\n").unwrap();
        assert_eq!(cache.relations(&ctx).unwrap().1, CacheStatus::Rebuilt);
    }

    #[test]
    fn directory_precedence() {
        let flag = Path::new("/tmp/flagged");
        assert_eq!(resolve_cache_dir(Some(flag)), flag);
        // The environment branch is exercised by the CLI tests in a child process.
        if std::env::var_os(CACHE_ENV).is_none() {
            assert_eq!(resolve_cache_dir(None), PathBuf::from(DEFAULT_CACHE_DIR));
        }
    }
}
