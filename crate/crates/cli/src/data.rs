use std::fs;
use std::path::{Path, PathBuf};

use maskopt::signal::io::{read_image, write_image};
use maskopt::{ComplexImage, MaskFile, SamplingPattern};
use serde::Serialize;

use crate::error::{CliError, Result};

pub struct Dataset {
    pub files: Vec<String>,
    pub images: Vec<ComplexImage>,
}

/// All `.cmrimg` and `.pgm` files in `dir`, sorted by name.
pub fn load_dir(dir: &Path) -> Result<Dataset> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(CliError::io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("cmrimg" | "pgm")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Data(format!("{}: no .cmrimg or .pgm images", dir.display())));
    }
    let mut files = Vec::with_capacity(paths.len());
    let mut images = Vec::with_capacity(paths.len());
    for p in &paths {
        let img = read_image(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
        if let Some(first) = images.first().map(ComplexImage::shape) {
            if img.shape() != first {
                return Err(CliError::Data(format!(
                    "{}: shape {:?} differs from {:?}",
                    p.display(),
                    img.shape(),
                    first
                )));
            }
        }
        files.push(p.file_name().unwrap_or_default().to_string_lossy().into_owned());
        images.push(img);
    }
    Ok(Dataset { files, images })
}

pub fn save_image(path: &Path, img: &ComplexImage) -> Result<()> {
    write_image(path, img).map_err(|e| match e {
        maskopt::Error::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        e => e.into(),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    fs::write(path, text).map_err(CliError::io(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

pub fn read_mask(path: &Path) -> Result<(MaskFile, SamplingPattern)> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let file = MaskFile::from_json(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let pattern = file.to_pattern()?;
    Ok((file, pattern))
}

/// `<path>.manifest.json` next to an output file.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Seconds since the Unix epoch, only when requested.
pub fn timestamp(enabled: bool) -> Option<u64> {
    enabled.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    })
}
