//! File helpers: path-aware reads and atomic writes.

use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use anyhow::{anyhow, Context};

use qmseg_core::imaging::load_pgm;
use qmseg_core::{BinaryMask, GrayImage};

use crate::error::{CliError, CliResult};

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| {
        let err = anyhow!("cannot read {}: {e}", path.display());
        if e.kind() == ErrorKind::NotFound || e.kind() == ErrorKind::PermissionDenied {
            CliError::Usage(err)
        } else {
            CliError::Runtime(err)
        }
    })
}

pub fn read_image(path: &Path) -> CliResult<GrayImage> {
    let bytes = read_bytes(path)?;
    load_pgm(&bytes)
        .with_context(|| format!("cannot decode {}", path.display()))
        .map_err(CliError::usage)
}

/// Reads a mask PGM; pixels above half scale are foreground.
pub fn read_mask(path: &Path) -> CliResult<BinaryMask> {
    read_image(path).map(|img| img.threshold(0.5))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create directory {}", dir.display()))
        .map_err(CliError::runtime)?;
    let name = path.file_name().ok_or_else(|| {
        CliError::usage(anyhow!("output path {} has no file name", path.display()))
    })?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::runtime(anyhow!(
            "cannot write {}: {e}",
            path.display()
        )));
    }
    Ok(())
}
