//! Grid file formats.
//!
//! CSV:
//!
//! ```text
//! u_min,du,Nu,v_min,dv,Nv
//! <values>
//! j,k,re,im
//! <one row per sample, j-major>
//! ```
//!
//! Binary (little-endian): magic `ZAKG`, version `u32`, `Nu u32`, `Nv u32`,
//! `a f64`, `b f64`, `u_min f64`, `v_min f64` (48 bytes), followed by
//! `Nu·Nv` samples as `(re f64, im f64)`, j-major.
//!
//! Floats are written in shortest round-trip form, so files are byte-stable.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use super::{IdealZakState, ModularWavefunction, ZakGrid, ZakPatch};
use crate::error::{Result, ZakError};

const MAGIC: &[u8; 4] = b"ZAKG";
const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 48;

pub fn grid_to_csv(psi: &ModularWavefunction) -> String {
    let g = psi.grid();
    let mut out = String::new();
    out.push_str("u_min,du,Nu,v_min,dv,Nv\n");
    let _ = writeln!(
        out,
        "{:?},{:?},{},{:?},{:?},{}",
        g.patch().u_min(),
        g.du(),
        g.nu(),
        g.patch().v_min(),
        g.dv(),
        g.nv()
    );
    out.push_str("j,k,re,im\n");
    for ((j, k), z) in psi.samples().indexed_iter() {
        let _ = writeln!(out, "{j},{k},{:?},{:?}", z.re, z.im);
    }
    out
}

fn parse<T: std::str::FromStr>(field: Option<&str>, what: &str) -> Result<T> {
    field
        .map(str::trim)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ZakError::Format(format!("cannot parse {what}")))
}

pub fn grid_from_csv(text: &str) -> Result<ModularWavefunction> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("u_min,du,Nu,v_min,dv,Nv") {
        return Err(ZakError::Format("missing grid header".into()));
    }
    let meta = lines.next().ok_or_else(|| ZakError::Format("missing grid parameters".into()))?;
    let mut f = meta.split(',');
    let u_min: f64 = parse(f.next(), "u_min")?;
    let du: f64 = parse(f.next(), "du")?;
    let nu: usize = parse(f.next(), "Nu")?;
    let v_min: f64 = parse(f.next(), "v_min")?;
    let dv: f64 = parse(f.next(), "dv")?;
    let nv: usize = parse(f.next(), "Nv")?;
    let a = du * nu as f64;
    let b = 2.0 * PI / (dv * nv as f64);
    let grid = ZakGrid::with_even_counts(ZakPatch::with_origin(a, b, u_min, v_min)?, nu, nv)?;
    if lines.next().map(str::trim) != Some("j,k,re,im") {
        return Err(ZakError::Format("missing sample header".into()));
    }
    let mut samples = Array2::zeros((nu, nv));
    let mut seen = 0usize;
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let mut f = line.split(',');
        let j: usize = parse(f.next(), "j")?;
        let k: usize = parse(f.next(), "k")?;
        let re: f64 = parse(f.next(), "re")?;
        let im: f64 = parse(f.next(), "im")?;
        *samples
            .get_mut((j, k))
            .ok_or_else(|| ZakError::Format(format!("sample index ({j},{k}) out of range")))? =
            Complex64::new(re, im);
        seen += 1;
    }
    if seen != nu * nv {
        return Err(ZakError::Format(format!("expected {} samples, found {seen}", nu * nv)));
    }
    ModularWavefunction::new(grid, samples)
}

pub fn grid_to_bytes(psi: &ModularWavefunction) -> Vec<u8> {
    let g = psi.grid();
    let p = g.patch();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.nu() * g.nv());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.nu() as u32).to_le_bytes());
    out.extend_from_slice(&(g.nv() as u32).to_le_bytes());
    for x in [p.a(), p.b(), p.u_min(), p.v_min()] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for z in psi.samples().iter() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn grid_from_bytes(bytes: &[u8]) -> Result<ModularWavefunction> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(ZakError::Format("not a ZAKG grid".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(ZakError::Format(format!("unsupported version {version}")));
    }
    let (nu, nv) = (u32_at(8) as usize, u32_at(12) as usize);
    let patch = ZakPatch::with_origin(f64_at(16), f64_at(24), f64_at(32), f64_at(40))?;
    let grid = ZakGrid::with_even_counts(patch, nu, nv)?;
    if bytes.len() != HEADER_LEN + 16 * nu * nv {
        return Err(ZakError::Format(format!(
            "expected {} bytes of samples, found {}",
            16 * nu * nv,
            bytes.len() - HEADER_LEN
        )));
    }
    let data: Vec<Complex64> = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let samples = Array2::from_shape_vec((nu, nv), data).map_err(|e| ZakError::Format(e.to_string()))?;
    ModularWavefunction::new(grid, samples)
}

/// Point list `u,v,re,im` for an ideal state.
pub fn points_to_csv(s: &IdealZakState) -> String {
    let mut out = String::from("u,v,re,im\n");
    for p in s.points() {
        let _ = writeln!(out, "{:?},{:?},{:?},{:?}", p.u, p.v, p.weight.re, p.weight.im);
    }
    out
}

/// Magnitude and phase table `j,k,u,v,abs,arg` for plotting.
pub fn magnitude_phase_csv(psi: &ModularWavefunction) -> String {
    let g = psi.grid();
    let mut out = String::from("j,k,u,v,abs,arg\n");
    for ((j, k), z) in psi.samples().indexed_iter() {
        let _ = writeln!(out, "{j},{k},{:?},{:?},{:?},{:?}", g.u(j), g.v(k), z.norm(), z.arg());
    }
    out
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
