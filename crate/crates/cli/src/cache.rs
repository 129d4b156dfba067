use std::path::{Path, PathBuf};

use folner_core::models::{SpectralCache, SpectralDensity};
use folner_core::{Error, Result};

/// Environment variable that overrides `--cache`.
pub const CACHE_ENV: &str = "FOLNER_CACHE_DIR";

/// Spectral data stored as `<key>.fsd` files. Nothing is ever evicted;
/// delete the directory to reclaim space.
#[derive(Clone, Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.fsd"))
    }
}

impl SpectralCache for DiskCache {
    /// Unreadable or corrupt entries count as misses and get recomputed.
    fn load(&self, key: &str) -> Option<SpectralDensity> {
        let bytes = std::fs::read(self.path(key)).ok()?;
        SpectralDensity::from_bytes(&bytes).ok()
    }

    fn store(&self, key: &str, data: &SpectralDensity) -> Result<()> {
        // Write-then-rename so a concurrent reader never sees a torn file.
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        std::fs::write(&tmp, data.to_bytes()).map_err(|e| Error::Cache(e.to_string()))?;
        std::fs::rename(&tmp, self.path(key)).map_err(|e| Error::Cache(e.to_string()))
    }
}
