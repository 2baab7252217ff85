//! On-disk result cache. Entries are whole reports without timings, keyed by
//! input digest, command and tool version. Any unreadable entry is treated
//! as a miss, so the directory can be deleted at any time.

use std::fs;
use std::path::{Path, PathBuf};

use crate::report::{sha256_hex, RunReport, TOOL_VERSION};

pub const CACHE_ENV: &str = "RVZ_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".rvzcache";

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        Cache { dir }
    }

    pub fn at(dir: impl AsRef<Path>) -> Self {
        Cache { dir: dir.as_ref().to_path_buf() }
    }

    fn entry(&self, command: &str, digest: &str) -> PathBuf {
        let key = sha256_hex(format!("{digest}\n{command}\n{TOOL_VERSION}").as_bytes());
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, command: &str, digest: &str) -> Option<RunReport> {
        let text = fs::read_to_string(self.entry(command, digest)).ok()?;
        let report: RunReport = serde_json::from_str(&text).ok()?;
        (report.input_digest == digest && report.command.name == command && report.tool_version == TOOL_VERSION)
            .then_some(report)
    }

    /// Best effort: a cache that cannot be written is silently skipped.
    pub fn store(&self, report: &RunReport) {
        let mut entry = report.clone();
        entry.timings = None;
        let Ok(text) = serde_json::to_string(&entry) else { return };
        if fs::create_dir_all(&self.dir).is_err() {
            return;
        }
        let path = self.entry(&report.command.name, &report.input_digest);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        if fs::write(&tmp, text).is_ok() && fs::rename(&tmp, &path).is_err() {
            let _ = fs::remove_file(&tmp);
        }
    }
}
