//! On-disk cache for reference grids.
//!
//! Format: one ASCII header line, then `nx * nt` little-endian f64 values in
//! x-major order. Reload is bit-exact.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::pde::grid::{GridSpec, ReferenceGrid};

const FORMAT_VERSION: u32 = 1;

pub fn cache_path(dir: &Path, key: &str, spec: GridSpec) -> PathBuf {
    dir.join(format!("{key}_{}x{}_v{FORMAT_VERSION}.refgrid", spec.nx, spec.nt))
}

pub fn store(path: &Path, key: &str, grid: &ReferenceGrid) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    writeln!(
        file,
        "pinndeim-refgrid v{FORMAT_VERSION} problem={key} nx={} nt={} solver={} layout=x-major-f64le",
        grid.spec.nx, grid.spec.nt, grid.solver
    )?;
    for v in grid.flat() {
        file.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn load(path: &Path, key: &str, spec: GridSpec) -> Result<ReferenceGrid> {
    let mut file = fs::File::open(path)?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;

    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| Error::Format("header is not utf-8".into()))?;

    let mut fields = header.split_whitespace();
    if fields.next() != Some("pinndeim-refgrid") {
        return Err(Error::Format("not a refgrid file".into()));
    }
    if fields.next() != Some(&format!("v{FORMAT_VERSION}")) {
        return Err(Error::Format("unsupported format version".into()));
    }
    let mut problem = None;
    let mut nx = None;
    let mut nt = None;
    let mut solver = String::new();
    for field in fields {
        match field.split_once('=') {
            Some(("problem", v)) => problem = Some(v.to_string()),
            Some(("nx", v)) => nx = v.parse::<usize>().ok(),
            Some(("nt", v)) => nt = v.parse::<usize>().ok(),
            Some(("solver", v)) => solver = v.to_string(),
            Some(("layout", v)) if v == "x-major-f64le" => {}
            Some(("layout", v)) => {
                return Err(Error::Format(format!("unsupported layout '{v}'")));
            }
            _ => return Err(Error::Format(format!("unexpected header field '{field}'"))),
        }
    }
    if problem.as_deref() != Some(key) {
        return Err(Error::Format(format!(
            "cache holds problem {problem:?}, wanted {key}"
        )));
    }
    if nx != Some(spec.nx) || nt != Some(spec.nt) {
        return Err(Error::Format(format!(
            "cache grid {nx:?}x{nt:?} does not match requested {}x{}",
            spec.nx, spec.nt
        )));
    }

    let data = &bytes[newline + 1..];
    let expected = spec.nx * spec.nt * 8;
    if data.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, expected {expected}",
            data.len()
        )));
    }
    let mut values = Vec::with_capacity(spec.nx * spec.nt);
    for chunk in data.chunks_exact(8) {
        values.push(f64::from_le_bytes(chunk.try_into().unwrap()));
    }
    let values = Array2::from_shape_vec((spec.nx, spec.nt), values)
        .map_err(|e| Error::Format(format!("bad shape: {e}")))?;
    ReferenceGrid::new(spec, solver, values)
}
