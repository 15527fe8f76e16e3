//! File formats: NPY tensors, JSON manifests and reports, CSV tables and
//! rendered figures. Every writer replaces its target atomically.

pub mod manifest;
pub mod npy;
pub mod render;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::analytics::ClusterReport;
use crate::error::{Error, Result};

pub use manifest::{read_manifest, write_manifest};
pub use npy::{read_array, write_array, ArrayData, ArrayFile, Dtype};
pub use render::{render_histogram, render_kernel_grid, Colormap, Normalize, RenderSpec};
pub use table::{read_proportions, write_proportions};

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn report_to_json(report: &ClusterReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn write_report(path: impl AsRef<Path>, report: &ClusterReport) -> Result<()> {
    write_atomic(path.as_ref(), report_to_json(report)?.as_bytes())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ClusterReport> {
    serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_and_cleans_up() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.bin");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.bin"), b"x").is_err());
    }
}
