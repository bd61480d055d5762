//! On-disk cache of fiber count tables.
//!
//! Files are keyed by a hash of (canonical tree, group, degree, sockets);
//! the stored metadata is compared on load, so hash collisions only cost a
//! recomputation.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::hilbert::{FiberCountTable, TableMeta};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV_VAR: &str = "PHYLOTOPE_CACHE";

/// Default cache directory, relative to the working directory.
pub const DEFAULT_CACHE_DIR: &str = ".phylotope-cache";

#[derive(Clone, Debug)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into() }
    }

    /// Explicit directory, else `PHYLOTOPE_CACHE`, else `.phylotope-cache/`.
    pub fn resolve(explicit: Option<PathBuf>) -> Self {
        let dir = explicit
            .or_else(|| std::env::var_os(CACHE_ENV_VAR).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        TableCache::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, meta: &TableMeta) -> PathBuf {
        self.dir.join(format!("{:016x}.json", fnv1a64(meta.key().as_bytes())))
    }

    /// Loads a table if present and its metadata matches exactly.
    pub fn lookup(&self, meta: &TableMeta) -> Option<FiberCountTable> {
        let text = fs::read_to_string(self.path_for(meta)).ok()?;
        let table = FiberCountTable::from_json_str(&text).ok()?;
        (table.meta() == meta).then_some(table)
    }

    pub fn store(&self, table: &FiberCountTable) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(table.meta());
        fs::write(path, table.to_json_string())?;
        Ok(())
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fiber_table, CountOptions};
    use crate::model::ModelPolytope;
    use crate::tree::{RootSpec, RootedPhyloTree};

    #[test]
    fn store_and_lookup() {
        let tree = RootedPhyloTree::parse("((1,2),3);", Some(&RootSpec::Leaf(3))).unwrap();
        let p = ModelPolytope::new(tree, "Z2xZ2".parse().unwrap()).unwrap();
        let socket = ("e".to_string(), p.tree().root_edge());
        let table = fiber_table(&p, 2, &[socket], &CountOptions::default()).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path());
        assert!(cache.lookup(table.meta()).is_none());
        cache.store(&table).unwrap();
        let loaded = cache.lookup(table.meta()).unwrap();
        assert_eq!(loaded, table);

        // A different degree misses.
        let other = TableMeta { n: 3, ..table.meta().clone() };
        assert!(cache.lookup(&other).is_none());
    }
}
