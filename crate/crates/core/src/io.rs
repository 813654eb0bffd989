//! On-disk formats: PFLD fields, OBJ meshes, CSV curves and tables, run manifests.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::flow::{EnergyReport, ENERGY_CSV_HEADER};
use crate::grid::{GridSpec, Point, ScalarField};
use crate::mesh::Mesh;
use crate::path::SweepSurface;

pub const PFLD_MAGIC: &[u8; 4] = b"PFLD";
pub const PFLD_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

pub fn encode_field(f: &ScalarField) -> Vec<u8> {
    let spec = f.spec();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * spec.len());
    out.extend_from_slice(PFLD_MAGIC);
    out.extend_from_slice(&PFLD_VERSION.to_le_bytes());
    out.extend_from_slice(&(spec.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(spec.n() as u32).to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_field(bytes: &[u8], path: &Path) -> Result<ScalarField> {
    if bytes.len() < HEADER_LEN {
        return Err(format_err(path, "truncated header"));
    }
    if &bytes[..4] != PFLD_MAGIC {
        return Err(format_err(path, "bad magic (expected PFLD)"));
    }
    let word = |k: usize| u32::from_le_bytes(bytes[4 * k..4 * k + 4].try_into().unwrap());
    let version = word(1);
    if version != PFLD_VERSION {
        return Err(format_err(path, format!("unsupported version {version}")));
    }
    let spec = GridSpec::new(word(2) as usize, word(3) as usize).map_err(|e| format_err(path, e.to_string()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * spec.len() {
        return Err(format_err(
            path,
            format!("expected {} values, found {} bytes", spec.len(), body.len()),
        ));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::from_values(spec, values).map_err(|e| format_err(path, e.to_string()))
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes `path` plus a `path.meta` text sidecar with grid and summary statistics.
pub fn write_field(path: &Path, f: &ScalarField) -> Result<()> {
    fs::write(path, encode_field(f))?;
    let spec = f.spec();
    let meta = format!(
        "format = PFLD\nversion = {PFLD_VERSION}\ndim = {}\nn = {}\nh = {}\nmin = {}\nmax = {}\nintegral = {}\n",
        spec.dim(),
        spec.n(),
        spec.h(),
        f.min(),
        f.max(),
        f.integral()
    );
    fs::write(meta_path(path), meta)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    let bytes = fs::read(path)?;
    decode_field(&bytes, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WriteStatus {
    Written,
    Empty,
}

/// Triangles as `f`, contour segments as `l`; indices are 1-based.
pub fn write_obj(path: &Path, mesh: &Mesh) -> Result<WriteStatus> {
    mesh.validate()?;
    let mut s = String::new();
    for v in &mesh.vertices {
        writeln!(s, "v {} {} {}", v[0], v[1], v[2]).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    for l in &mesh.segments {
        writeln!(s, "l {} {}", l[0] + 1, l[1] + 1).unwrap();
    }
    fs::write(path, s)?;
    if mesh.is_empty() {
        log::warn!("wrote empty mesh to {}", path.display());
        Ok(WriteStatus::Empty)
    } else {
        Ok(WriteStatus::Written)
    }
}

/// Sweep lattice as quads (closed rows wrap around).
pub fn write_sweep_obj(path: &Path, s: &SweepSurface) -> Result<()> {
    let m = s.samples_per_row();
    let mut out = String::new();
    for p in s.all_points() {
        writeln!(out, "v {} {} {}", p[0], p[1], p[2]).unwrap();
    }
    let cols = if s.closed_rows() { m } else { m.saturating_sub(1) };
    for k in 0..s.steps() {
        for j in 0..cols {
            let j1 = (j + 1) % m;
            let id = |r: usize, c: usize| r * m + c + 1;
            writeln!(out, "f {} {} {} {}", id(k, j), id(k, j1), id(k + 1, j1), id(k + 1, j)).unwrap();
        }
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_points_csv(path: &Path, points: &[Point]) -> Result<()> {
    let mut s = String::from("x,y,z\n");
    for p in points {
        writeln!(s, "{},{},{}", p[0], p[1], p[2]).unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

/// Reads `x,y[,z]` rows; a non-numeric first line is treated as a header.
pub fn read_points_csv(path: &Path) -> Result<Vec<Point>> {
    let file = fs::File::open(path)?;
    let mut out = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 2 || v.len() == 3 => out.push([v[0], v[1], v.get(2).copied().unwrap_or(0.0)]),
            Err(_) if k == 0 => continue,
            _ => return Err(format_err(path, format!("line {}: expected 2 or 3 numbers", k + 1))),
        }
    }
    Ok(out)
}

pub fn energy_csv(history: &[EnergyReport]) -> String {
    let mut s = String::from(ENERGY_CSV_HEADER);
    s.push('\n');
    for r in history {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

pub fn write_energy_csv(path: &Path, history: &[EnergyReport]) -> Result<()> {
    fs::write(path, energy_csv(history))?;
    Ok(())
}

pub fn write_table_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut s = format!("{header}\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    pub config: String,
    pub artifacts: Vec<PathBuf>,
    pub version: String,
    pub phases: Vec<(String, Duration)>,
}

impl RunManifest {
    pub fn new(config: String) -> Self {
        RunManifest {
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Default::default()
        }
    }

    pub fn add(&mut self, path: impl Into<PathBuf>) {
        self.artifacts.push(path.into());
    }

    /// Writes the manifest after checking that every listed artifact exists.
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(missing) = self.artifacts.iter().find(|p| !p.exists()) {
            return Err(format_err(missing, "listed artifact is missing"));
        }
        let mut f = fs::File::create(path)?;
        writeln!(f, "version = {}", self.version)?;
        for (name, d) in &self.phases {
            writeln!(f, "time.{name} = {:.6}", d.as_secs_f64())?;
        }
        for a in &self.artifacts {
            writeln!(f, "artifact = {}", a.display())?;
        }
        writeln!(f, "\n[config]")?;
        f.write_all(self.config.as_bytes())?;
        Ok(())
    }
}
