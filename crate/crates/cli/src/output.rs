use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "SBPSAT_OUT";

/// Directory that receives a command's files.
#[derive(Clone, Debug)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    /// The configured directory (flag or config file), then `$SBPSAT_OUT`,
    /// then the working directory.
    pub fn resolve(configured: Option<PathBuf>) -> CliResult<Self> {
        let root = configured
            .or_else(|| {
                std::env::var_os(OUT_DIR_ENV)
                    .filter(|v| !v.is_empty())
                    .map(PathBuf::from)
            })
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&root).map_err(|source| CliError::Write {
            path: root.clone(),
            source,
        })?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let target = self.path(name);
        write_atomic(&target, contents.as_bytes())?;
        Ok(target)
    }

    pub fn write_json<S: Serialize>(&self, name: &str, value: &S) -> CliResult<PathBuf> {
        self.write_text(name, &to_json(value)?)
    }
}

pub fn to_json<S: Serialize>(value: &S) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes to a sibling temporary file and renames it over `target`, so
/// readers never observe a partial file.
pub fn write_atomic(target: &Path, bytes: &[u8]) -> CliResult<()> {
    let fail = |source| CliError::Write {
        path: target.to_path_buf(),
        source,
    };
    let name = target
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = target.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, target));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = std::env::temp_dir().join(format!("sbpsat-out-{}", std::process::id()));
        let out = OutputDir::resolve(Some(dir.clone())).unwrap();
        out.write_text("a.csv", "first\n").unwrap();
        out.write_text("a.csv", "second\n").unwrap();
        assert_eq!(fs::read_to_string(dir.join("a.csv")).unwrap(), "second\n");
        let leftovers = fs::read_dir(&dir)
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"));
        assert_eq!(leftovers.count(), 0);
        fs::remove_dir_all(dir).unwrap();
    }
}
