//! Flat-file formats for matrices, frame systems and curves.
//!
//! Matrices are stored either as CSV (one row per line, complex entries as
//! `re+imj`) with an optional JSON sidecar `{"n", "margin", "dtype"}`, or as a
//! binary file: 16-byte header `FFMX`, `u32 N`, `u32 flags`, four reserved zero
//! bytes, then little-endian `f64` entries in row-major order (interleaved
//! `re, im` when flag bit 0 is set). Both encodings reproduce entries bit-exactly.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameSystem;
use crate::matrix::{default_margin, TruncatedMatrix};
use crate::nonfinite::{format_f64, parse_f64};

pub const MAGIC: &[u8; 4] = b"FFMX";
const HEADER_LEN: usize = 16;
const FLAG_COMPLEX: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F64,
    C128,
}

/// Sidecar of a CSV matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub n: usize,
    pub margin: usize,
    pub dtype: Dtype,
}

/// Metadata of a stored frame system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMeta {
    pub label: String,
    pub n: usize,
    pub reference: String,
}

fn dtype_of(a: &TruncatedMatrix) -> Dtype {
    if a.is_real() {
        Dtype::F64
    } else {
        Dtype::C128
    }
}

/// `re` for real entries, `re+imj` or `re-imj` otherwise.
pub fn format_complex(z: Complex64, dtype: Dtype) -> String {
    match dtype {
        Dtype::F64 => format_f64(z.re),
        Dtype::C128 => {
            let im = format_f64(z.im);
            if im.starts_with('-') {
                format!("{}{}j", format_f64(z.re), im)
            } else {
                format!("{}+{}j", format_f64(z.re), im)
            }
        }
    }
}

/// Inverse of [`format_complex`]; also accepts a bare real.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('j') else {
        return parse_f64(s).map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is neither leading nor an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = parse_f64(&body[..split])?;
    let im = parse_f64(&body[split..])?;
    Some(Complex64::new(re, im))
}

pub fn matrix_to_csv(a: &TruncatedMatrix) -> String {
    let dtype = dtype_of(a);
    let n = a.n();
    let mut out = String::new();
    for m in 1..=n {
        let row: Vec<String> = (1..=n).map(|k| format_complex(a.get(m, k), dtype)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a square CSV matrix.
pub fn matrix_from_csv(text: &str, margin: Option<usize>) -> Result<TruncatedMatrix> {
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let n = rows.len();
    if n == 0 {
        return Err(Error::Format("empty matrix file".into()));
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (i, line) in rows.iter().enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n {
            return Err(Error::Format(format!("row {} has {} entries, expected {n}", i + 1, cells.len())));
        }
        for (j, cell) in cells.iter().enumerate() {
            m[(i, j)] = parse_complex(cell)
                .ok_or_else(|| Error::Format(format!("bad entry {:?} at ({}, {})", cell.trim(), i + 1, j + 1)))?;
        }
    }
    TruncatedMatrix::new(m, margin.unwrap_or_else(|| default_margin(n)))
}

pub fn matrix_to_bytes(a: &TruncatedMatrix) -> Vec<u8> {
    let n = a.n();
    let complex = !a.is_real();
    let mut out = Vec::with_capacity(HEADER_LEN + n * n * if complex { 16 } else { 8 });
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(if complex { FLAG_COMPLEX } else { 0 }).to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    for m in 1..=n {
        for k in 1..=n {
            let z = a.get(m, k);
            out.extend_from_slice(&z.re.to_le_bytes());
            if complex {
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    out
}

pub fn matrix_from_bytes(bytes: &[u8], margin: Option<usize>) -> Result<TruncatedMatrix> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing FFMX header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let n = word(4) as usize;
    let flags = word(8);
    if flags & !FLAG_COMPLEX != 0 {
        return Err(Error::Format(format!("unknown flags {flags:#x}")));
    }
    let complex = flags & FLAG_COMPLEX != 0;
    let width = if complex { 16 } else { 8 };
    if bytes.len() != HEADER_LEN + n * n * width {
        return Err(Error::Format(format!("expected {} payload bytes for N = {n}", n * n * width)));
    }
    let float = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let m = DMatrix::from_fn(n, n, |i, j| {
        let at = HEADER_LEN + (i * n + j) * width;
        Complex64::new(float(at), if complex { float(at + 8) } else { 0.0 })
    });
    TruncatedMatrix::new(m, margin.unwrap_or_else(|| default_margin(n)))
}

/// `A.csv` → `A.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// `A.csv` → `A.frame.json`.
pub fn frame_meta_path(path: &Path) -> PathBuf {
    path.with_extension("frame.json")
}

fn is_binary_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin" || e == "ffmx")
}

/// Writes binary for `.bin`/`.ffmx` paths, otherwise CSV with a sidecar.
pub fn save_matrix(a: &TruncatedMatrix, path: &Path) -> Result<()> {
    if is_binary_path(path) {
        fs::write(path, matrix_to_bytes(a))?;
    } else {
        fs::write(path, matrix_to_csv(a))?;
        let meta = MatrixMeta { n: a.n(), margin: a.margin(), dtype: dtype_of(a) };
        fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    }
    Ok(())
}

/// Reads either encoding, detected by the magic bytes; a CSV sidecar, if present, fixes the margin.
pub fn load_matrix(path: &Path) -> Result<TruncatedMatrix> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        return matrix_from_bytes(&bytes, None);
    }
    let text = String::from_utf8(bytes).map_err(|_| Error::Format("matrix file is neither FFMX nor UTF-8".into()))?;
    let sidecar = sidecar_path(path);
    let meta: Option<MatrixMeta> =
        if sidecar.exists() && sidecar != path { Some(serde_json::from_str(&fs::read_to_string(sidecar)?)?) } else { None };
    let a = matrix_from_csv(&text, meta.map(|m| m.margin))?;
    if let Some(meta) = meta {
        if meta.n != a.n() {
            return Err(Error::Format(format!("sidecar declares n = {}, file has {}", meta.n, a.n())));
        }
        if meta.dtype == Dtype::F64 && !a.is_real() {
            return Err(Error::Format("sidecar declares f64 but entries are complex".into()));
        }
    }
    Ok(a)
}

pub fn save_frame(e: &FrameSystem, path: &Path) -> Result<()> {
    save_matrix(e.coeffs(), path)?;
    let meta = FrameMeta { label: e.label().to_string(), n: e.n(), reference: "hermite".into() };
    fs::write(frame_meta_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn load_frame(path: &Path) -> Result<FrameSystem> {
    let a = load_matrix(path)?;
    let meta_path = frame_meta_path(path);
    let label = if meta_path.exists() {
        let meta: FrameMeta = serde_json::from_str(&fs::read_to_string(meta_path)?)?;
        if meta.n != a.n() {
            return Err(Error::Format(format!("frame metadata declares n = {}, matrix has {}", meta.n, a.n())));
        }
        if meta.reference != "hermite" {
            return Err(Error::Format(format!("unsupported reference basis {:?}", meta.reference)));
        }
        meta.label
    } else {
        "loaded".to_string()
    };
    Ok(FrameSystem::new(a, label))
}

/// CSV with columns `M,k,error`.
pub fn error_curves_csv(curves: &[(f64, Vec<(usize, f64)>)]) -> String {
    let mut out = String::from("M,k,error\n");
    for (k, curve) in curves {
        for (m, err) in curve {
            out.push_str(&format!("{m},{},{}\n", format_f64(*k), format_f64(*err)));
        }
    }
    out
}
