//! File writers for run outputs.

use std::path::{Path, PathBuf};

use qwalk_core::compiler::{write_patterns, PlatePatternSet};
use qwalk_core::optics::CameraImage;
use serde::Serialize;

use crate::{CliError, Result};

pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let path = self.path(name);
        std::fs::write(&path, data).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn text(&mut self, name: &str, data: &str) -> Result<()> {
        self.bytes(name, data.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value).expect("serializable report");
        s.push('\n');
        self.text(name, &s)
    }

    pub fn patterns(&mut self, name: &str, patterns: &PlatePatternSet) -> Result<()> {
        let mut buf = Vec::new();
        write_patterns(patterns, &mut buf)?;
        self.bytes(name, &buf)
    }

    pub fn camera(
        &mut self,
        stem: &str,
        image: &CameraImage,
        sidecar: &CameraSidecar,
    ) -> Result<()> {
        self.bytes(&format!("{stem}.pgm"), &image.to_pgm16())?;
        self.json(&format!("{stem}.json"), sidecar)
    }
}

#[derive(Debug, Serialize)]
pub struct CameraSidecar {
    pub width: usize,
    pub height: usize,
    pub origin_px: [usize; 2],
    pub spot_spacing_px: usize,
    pub spot_sigma_px: f64,
    pub first_site: i64,
    pub last_site: i64,
    /// Intensity of the brightest pixel before 16-bit scaling.
    pub peak_intensity: f64,
    pub noise_floor: f64,
    pub seed: u64,
}

/// Fixed-width scientific notation used in every CSV.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// Comma-separated table with a header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}
