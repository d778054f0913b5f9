//! Figure regeneration: DDT and STFT magnitude maps of the three test chirps.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{DdtError, Result};
use crate::export::{export_map_csv, export_map_pgm};
use crate::grid::{make_grid, TimeGrid};
use crate::signal::{synthesize, SignalExpr};
use crate::transforms::{ddt_map, stft_map};
use crate::window::WindowSpec;

/// Output file format for maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFormat {
    Csv,
    Pgm,
}

impl MapFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            MapFormat::Csv => "csv",
            MapFormat::Pgm => "pgm",
        }
    }
}

/// The three test signals; the figure number follows the signal number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureSignal {
    S1,
    S2,
    S3,
}

impl FigureSignal {
    pub fn expr(&self) -> SignalExpr {
        let s1 = SignalExpr::LinearChirp { alpha: 1.0 };
        let s2 = SignalExpr::CubicChirp { beta: 0.1 };
        match self {
            FigureSignal::S1 => s1,
            FigureSignal::S2 => s2,
            FigureSignal::S3 => SignalExpr::Sum(vec![s1, s2]),
        }
    }

    pub fn number(&self) -> usize {
        match self {
            FigureSignal::S1 => 1,
            FigureSignal::S2 => 2,
            FigureSignal::S3 => 3,
        }
    }
}

/// Configuration for a figure run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureConfig {
    pub input_grid: TimeGrid,
    pub t_axis: TimeGrid,
    pub omega_axis: TimeGrid,
    pub window: WindowSpec,
    pub signals: Vec<FigureSignal>,
    pub output_dir: PathBuf,
    pub formats: Vec<MapFormat>,
}

impl FigureConfig {
    /// Default setup: 512 input samples on [-10, 10), 256 x 256 axes over
    /// [-5, 5) x [-5, 5), unit Gaussian window, all three signals, both
    /// formats.
    pub fn with_output_dir(dir: impl Into<PathBuf>) -> Self {
        let axis = make_grid(-5.0, 10.0 / 256.0, 256).expect("static grid");
        FigureConfig {
            input_grid: make_grid(-10.0, 20.0 / 512.0, 512).expect("static grid"),
            t_axis: axis,
            omega_axis: axis,
            window: WindowSpec::Gaussian { a: 1.0 },
            signals: vec![FigureSignal::S1, FigureSignal::S2, FigureSignal::S3],
            output_dir: dir.into(),
            formats: vec![MapFormat::Csv, MapFormat::Pgm],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t_axis.count() < 2 || self.omega_axis.count() < 2 {
            return Err(DdtError::invalid("figure axes need at least 2 points"));
        }
        if self.signals.is_empty() {
            return Err(DdtError::invalid("figure run needs at least one signal"));
        }
        if self.formats.is_empty() {
            return Err(DdtError::invalid("figure run needs at least one output format"));
        }
        Ok(())
    }
}

/// One emitted file with its checksum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
}

/// What a figure run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: FigureConfig,
    pub files: Vec<FileRecord>,
    pub duration_secs: f64,
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Emit DDT ("a") and STFT ("b") maps for each configured signal as
/// `fig<n><a|b>.<ext>`, plus `manifest.json`.
pub fn run_figures(cfg: &FigureConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let started = Instant::now();
    fs::create_dir_all(&cfg.output_dir)?;
    let mut files = Vec::new();
    for sig in &cfg.signals {
        let s = synthesize(&sig.expr(), &cfg.input_grid)?;
        let ddt = ddt_map(&s, &cfg.window, &cfg.omega_axis, &cfg.t_axis)?;
        let stft = stft_map(&s, &cfg.window, &cfg.omega_axis, &cfg.t_axis)?;
        for (panel, map) in [("a", &ddt), ("b", &stft)] {
            for format in &cfg.formats {
                let name = format!("fig{}{}.{}", sig.number(), panel, format.extension());
                let path = cfg.output_dir.join(&name);
                match format {
                    MapFormat::Csv => export_map_csv(map, &path)?,
                    MapFormat::Pgm => export_map_pgm(map, &path)?,
                }
                files.push(FileRecord { name, sha256: sha256_hex(&path)? });
            }
        }
    }
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        files,
        duration_secs: started.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| DdtError::format(format!("manifest: {e}")))?;
    fs::write(cfg.output_dir.join("manifest.json"), json)?;
    Ok(manifest)
}
