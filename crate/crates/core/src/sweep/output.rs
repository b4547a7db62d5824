//! Files written for a run: per-cell CSV, grayscale heatmaps, a resonance-line
//! overlay and a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma};
use serde::{Deserialize, Serialize};

use super::config::{ImageFormat, Observable};
use super::run::{Mode, SweepResult};
use crate::basis::Coupling;
use crate::error::{Error, Result};
use crate::interference::lines_in_window;
use crate::molecule::MoleculeSpec;

pub const CSV_FILE: &str = "cells.csv";
pub const LINES_FILE: &str = "lines.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// One CSV row: a level of one cell. `epsilon` is NaN where undefined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub species: String,
    pub tau_ps: f64,
    pub delta_rad: f64,
    pub level: i32,
    #[serde(rename = "Q")]
    pub q: f64,
    pub epsilon: f64,
    #[serde(rename = "Jz")]
    pub jz: f64,
    #[serde(rename = "E_abs")]
    pub e_abs: f64,
}

impl CsvRow {
    /// Equality of every float bit pattern (NaN equals NaN).
    pub fn bit_eq(&self, other: &CsvRow) -> bool {
        // every NaN is written as the same token
        let canon = |x: f64| {
            if x.is_nan() {
                f64::NAN.to_bits()
            } else {
                x.to_bits()
            }
        };
        let bits = |r: &CsvRow| [r.tau_ps, r.delta_rad, r.q, r.epsilon, r.jz, r.e_abs].map(canon);
        self.species == other.species && self.level == other.level && bits(self) == bits(other)
    }
}

const CSV_HEADER: [&str; 8] = [
    "species",
    "tau_ps",
    "delta_rad",
    "level",
    "Q",
    "epsilon",
    "Jz",
    "E_abs",
];

/// 17 significant digits, enough to round-trip every `f64`.
fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Levels reported for a species: the configured list, else every level the
/// species actually has up to its truncation.
pub fn reported_levels(requested: &[i32], molecule: &MoleculeSpec, level_max: i32) -> Vec<i32> {
    if !requested.is_empty() {
        return requested.to_vec();
    }
    (0..=level_max)
        .filter(|&l| molecule.allowed_rot_parity.allows(l) && molecule.level_weight(l) > 0.0)
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

pub fn rows(result: &SweepResult) -> Vec<CsvRow> {
    let mut out = Vec::new();
    for cell in &result.cells {
        let sp = &result.species[cell.species];
        for level in reported_levels(&result.config.levels, &sp.molecule, sp.level_max) {
            let r = &cell.report;
            out.push(CsvRow {
                species: sp.name.clone(),
                tau_ps: cell.tau,
                delta_rad: cell.delta,
                level,
                q: r.q(level),
                epsilon: r.epsilon(level).unwrap_or(f64::NAN),
                jz: r.jz,
                e_abs: r.energy_absorbed,
            });
        }
    }
    out
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_rows(&rows(result), path)
}

pub fn write_rows(rows: &[CsvRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.species.clone(),
            fmt17(r.tau_ps),
            fmt17(r.delta_rad),
            r.level.to_string(),
            fmt17(r.q),
            fmt17(r.epsilon),
            fmt17(r.jz),
            fmt17(r.e_abs),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Csv(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// A map of one observable over the (τ, δ) grid of one species: `values[τ][δ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Map {
    pub species: usize,
    pub observable: Observable,
    pub level: Option<i32>,
    pub values: Vec<Vec<f64>>,
}

/// `None` if the grid has missing cells.
pub fn map(
    result: &SweepResult,
    species: usize,
    observable: Observable,
    level: Option<i32>,
) -> Option<Map> {
    let mut values = vec![vec![0.0; result.deltas.len()]; result.taus.len()];
    for (it, row) in values.iter_mut().enumerate() {
        for (id, v) in row.iter_mut().enumerate() {
            let r = &result.cell(species, it, id)?.report;
            let l = level.unwrap_or(0);
            *v = match observable {
                Observable::Population => r.q(l),
                Observable::Directionality => r.epsilon(l).unwrap_or(f64::NAN),
                Observable::Jz => r.jz,
                Observable::Energy => r.energy_absorbed,
            };
        }
    }
    Some(Map {
        species,
        observable,
        level,
        values,
    })
}

/// Gray-level range: ε on [−1, 1], Q on [0, max], others on [min, max].
fn scale(m: &Map) -> (f64, f64) {
    let finite = m.values.iter().flatten().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    let (lo, hi) = match m.observable {
        Observable::Directionality => (-1.0, 1.0),
        Observable::Population => (0.0, hi.max(0.0)),
        _ if lo.is_finite() => (lo, hi),
        _ => (0.0, 0.0),
    };
    if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

/// 16-bit grayscale, `δ` along x, `τ` increasing upwards. Undefined ε is mid-gray.
pub fn write_heatmap(m: &Map, path: &Path, format: ImageFormat) -> Result<(f64, f64)> {
    let (lo, hi) = scale(m);
    let (h, w) = (
        m.values.len() as u32,
        m.values.first().map_or(0, Vec::len) as u32,
    );
    let img = ImageBuffer::from_fn(w, h, |x, y| {
        let v = m.values[(h - 1 - y) as usize][x as usize];
        let v = if v.is_nan() { 0.5 * (lo + hi) } else { v };
        Luma([(((v - lo) / (hi - lo)).clamp(0.0, 1.0) * 65535.0).round() as u16])
    });
    let fmt = match format {
        ImageFormat::Png => image::ImageFormat::Png,
        ImageFormat::Pgm => image::ImageFormat::Pnm,
    };
    img.save_with_format(path, fmt)
        .map_err(|e| Error::Image(e.to_string()))?;
    Ok((lo, hi))
}

/// One sampled point of a resonance line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineRow {
    pub species: String,
    pub level: i32,
    pub delta_m: i32,
    pub m: i32,
    pub t_exc_ps: f64,
    pub delta_rad: f64,
    pub tau_ps: f64,
    /// Fractional row index into the τ grid.
    pub tau_index: f64,
}

fn fractional_index(grid: &[f64], x: f64) -> f64 {
    match grid.len() {
        0 => f64::NAN,
        1 => 0.0,
        n => {
            let k = grid.partition_point(|&g| g <= x).clamp(1, n - 1);
            (k - 1) as f64 + (x - grid[k - 1]) / (grid[k] - grid[k - 1])
        }
    }
}

/// Resonance lines of the requested levels sampled at every δ of the grid,
/// restricted to the τ window.
pub fn line_rows(result: &SweepResult) -> Result<Vec<LineRow>> {
    let mut out = Vec::new();
    let (Some(&t0), Some(&t1)) = (result.taus.first(), result.taus.last()) else {
        return Ok(out);
    };
    let (Some(&d0), Some(&d1)) = (result.deltas.first(), result.deltas.last()) else {
        return Ok(out);
    };
    let eps = 1e-9 * (1.0 + t1.abs());
    for sp in &result.species {
        let levels: Vec<i32> = reported_levels(&result.config.levels, &sp.molecule, sp.level_max)
            .into_iter()
            .filter(|&l| l >= 2 && (sp.molecule.coupling() == Coupling::Linear || l % 2 == 1))
            .collect();
        for line in lines_in_window(&sp.molecule, &levels, (t0, t1), (d0, d1))? {
            for &delta in &result.deltas {
                let tau = line.tau_at(delta);
                if tau < t0 - eps || tau > t1 + eps {
                    continue;
                }
                out.push(LineRow {
                    species: sp.name.clone(),
                    level: line.j_to,
                    delta_m: line.delta_m,
                    m: line.m,
                    t_exc_ps: line.t_exc,
                    delta_rad: delta,
                    tau_ps: tau,
                    tau_index: fractional_index(&result.taus, tau),
                });
            }
        }
    }
    Ok(out)
}

pub fn write_lines(result: &SweepResult, path: &Path) -> Result<usize> {
    let rows = line_rows(result)?;
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record([
        "species",
        "level",
        "delta_m",
        "m",
        "t_exc_ps",
        "delta_rad",
        "tau_ps",
        "tau_index",
    ])
    .map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            r.species.clone(),
            r.level.to_string(),
            r.delta_m.to_string(),
            r.m.to_string(),
            fmt17(r.t_exc_ps),
            fmt17(r.delta_rad),
            fmt17(r.tau_ps),
            fmt17(r.tau_index),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(rows.len())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub species: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<i32>,
    /// Values mapped to gray 0 and 65535.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gray_range: Option<(f64, f64)>,
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes CSV, heatmaps (sweeps), line overlay (sweeps) and the manifest
/// into `dir`; returns the manifest path. The manifest is written last.
pub fn write_outputs(result: &SweepResult, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let entry = |path: &str, kind: &str| FileEntry {
        path: path.into(),
        kind: kind.into(),
        species: None,
        observable: None,
        level: None,
        gray_range: None,
    };
    write_csv(result, &dir.join(CSV_FILE))?;
    files.push(entry(CSV_FILE, "cells"));
    if result.mode == Mode::Sweep {
        write_lines(result, &dir.join(LINES_FILE))?;
        files.push(entry(LINES_FILE, "lines"));
        let ext = match result.config.output.image_format {
            ImageFormat::Png => "png",
            ImageFormat::Pgm => "pgm",
        };
        for (s, sp) in result.species.iter().enumerate() {
            for &obs in &result.config.output.heatmaps {
                let levels = if obs.per_level() {
                    reported_levels(&result.config.levels, &sp.molecule, sp.level_max)
                        .into_iter()
                        .map(Some)
                        .collect()
                } else {
                    vec![None]
                };
                for level in levels {
                    let Some(m) = map(result, s, obs, level) else {
                        continue;
                    };
                    let name = match level {
                        Some(l) => format!("{}_{}_{l}.{ext}", sanitize(&sp.name), obs.key()),
                        None => format!("{}_{}.{ext}", sanitize(&sp.name), obs.key()),
                    };
                    let range =
                        write_heatmap(&m, &dir.join(&name), result.config.output.image_format)?;
                    files.push(FileEntry {
                        species: Some(sp.name.clone()),
                        observable: Some(obs),
                        level,
                        gray_range: Some(range),
                        ..entry(&name, "heatmap")
                    });
                }
            }
        }
    }
    let manifest = Manifest::new(result, files);
    let path = dir.join(MANIFEST_FILE);
    fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(path)
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: Mode,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub config: &'a super::config::RunConfig,
    pub species: &'a [super::run::SpeciesInfo],
    pub tau_points: usize,
    pub delta_points: usize,
    pub cells_expected: usize,
    pub cells_written: usize,
    pub workers: usize,
    pub wall_time_s: f64,
    pub files: Vec<FileEntry>,
}

impl<'a> Manifest<'a> {
    pub fn new(result: &'a SweepResult, files: Vec<FileEntry>) -> Self {
        Manifest {
            tool: "chiral",
            version: env!("CARGO_PKG_VERSION"),
            mode: result.mode,
            status: match &result.failure {
                None => "ok",
                Some(e) if e.is_truncation() => "failed: truncation",
                Some(_) => "failed",
            },
            failure: result.failure.as_ref().map(ToString::to_string),
            config: &result.config,
            species: &result.species,
            tau_points: result.taus.len(),
            delta_points: result.deltas.len(),
            cells_expected: result.expected_cells(),
            cells_written: result.cells.len(),
            workers: result.workers,
            wall_time_s: result.wall_time,
            files,
        }
    }
}
