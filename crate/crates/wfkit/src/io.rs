//! Serialization: the `WFT1` tensor file format, wireframe JSON, and
//! PR-curve CSV emission.
//!
//! Tensor files are little-endian regardless of platform: 4-byte magic
//! `WFT1`, a u32 rank, rank u32 dimensions, then row-major (last dimension
//! fastest) IEEE-754 f32 values. Files are interchange, not checkpoints;
//! computation stays in f64.

use crate::grid::{Grid2D, Grid3D};
use crate::model::{Wireframe, WireframeDoc};
use crate::pr::PRCurve;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use thiserror::Error;

const MAGIC: &[u8; 4] = b"WFT1";
const MAX_ELEMENTS: u64 = 1 << 31;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("bad magic: not a WFT1 tensor file")]
    BadMagic,
    #[error("unsupported tensor rank {0}; expected 2 or 3")]
    UnsupportedRank(u32),
    #[error("tensor dimensions overflow")]
    DimOverflow,
    #[error("truncated tensor file: expected {expected} payload bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("trailing data after tensor payload")]
    TrailingData,
    #[error("non-finite value in tensor; refusing to write")]
    NonFinite,
    #[error("malformed wireframe JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A tensor read from or written to a `WFT1` file.
#[derive(Debug, Clone, PartialEq)]
pub enum Tensor {
    D2(Grid2D),
    D3(Grid3D),
}

impl From<Grid2D> for Tensor {
    fn from(g: Grid2D) -> Self {
        Tensor::D2(g)
    }
}

impl From<Grid3D> for Tensor {
    fn from(g: Grid3D) -> Self {
        Tensor::D3(g)
    }
}

impl Tensor {
    pub fn dims(&self) -> Vec<usize> {
        match self {
            Tensor::D2(g) => vec![g.height(), g.width()],
            Tensor::D3(g) => vec![g.channels(), g.height(), g.width()],
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            Tensor::D2(g) => g.data(),
            Tensor::D3(g) => g.data(),
        }
    }

    pub fn into_grid2(self) -> Option<Grid2D> {
        match self {
            Tensor::D2(g) => Some(g),
            Tensor::D3(_) => None,
        }
    }

    pub fn into_grid3(self) -> Option<Grid3D> {
        match self {
            Tensor::D3(g) => Some(g),
            Tensor::D2(_) => None,
        }
    }
}

/// Writes a tensor. Refuses non-finite values: files written by this
/// toolkit never contain NaN or infinity.
pub fn write_tensor(tensor: &Tensor, path: &Path) -> Result<(), IoError> {
    if tensor.values().iter().any(|v| !v.is_finite()) {
        return Err(IoError::NonFinite);
    }
    let dims = tensor.dims();
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in &dims {
        let d = u32::try_from(d).map_err(|_| IoError::DimOverflow)?;
        out.write_all(&d.to_le_bytes())?;
    }
    for &v in tensor.values() {
        out.write_all(&(v as f32).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a `WFT1` tensor file into a rank-2 or rank-3 grid.
pub fn read_tensor(path: &Path) -> Result<Tensor, IoError> {
    let bytes = fs::read(path)?;
    if bytes.len() < 8 || &bytes[0..4] != MAGIC {
        return Err(IoError::BadMagic);
    }
    let ndim = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if ndim != 2 && ndim != 3 {
        return Err(IoError::UnsupportedRank(ndim));
    }
    let ndim = ndim as usize;
    let header = 8 + 4 * ndim;
    if bytes.len() < header {
        return Err(IoError::Truncated { expected: header as u64, found: bytes.len() as u64 });
    }
    let mut dims = Vec::with_capacity(ndim);
    let mut elements: u64 = 1;
    for k in 0..ndim {
        let d = u32::from_le_bytes(bytes[8 + 4 * k..12 + 4 * k].try_into().unwrap()) as u64;
        elements = elements.checked_mul(d).ok_or(IoError::DimOverflow)?;
        dims.push(d as usize);
    }
    if elements > MAX_ELEMENTS {
        return Err(IoError::DimOverflow);
    }
    let expected = elements * 4;
    let found = (bytes.len() - header) as u64;
    if found < expected {
        return Err(IoError::Truncated { expected, found });
    }
    if found > expected {
        return Err(IoError::TrailingData);
    }
    let values: Vec<f64> = bytes[header..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok(match dims.as_slice() {
        [h, w] => Tensor::D2(Grid2D::from_vec(*h, *w, values)),
        [c, h, w] => Tensor::D3(Grid3D::from_vec(*c, *h, *w, values)),
        _ => unreachable!(),
    })
}

/// Serializes a wireframe to its JSON document form.
pub fn wireframe_to_json(w: &Wireframe) -> String {
    let doc = WireframeDoc::from(w);
    let mut s = serde_json::to_string_pretty(&doc).expect("wireframe serialization is infallible");
    s.push('\n');
    s
}

/// Parses a wireframe JSON document. Unknown fields are rejected; graph
/// invariants are the caller's business (`Wireframe::validate`).
pub fn wireframe_from_json(s: &str) -> Result<Wireframe, IoError> {
    let doc: WireframeDoc = serde_json::from_str(s)?;
    Ok(doc.into())
}

pub fn write_wireframe(w: &Wireframe, path: &Path) -> Result<(), IoError> {
    fs::write(path, wireframe_to_json(w))?;
    Ok(())
}

pub fn read_wireframe(path: &Path) -> Result<Wireframe, IoError> {
    wireframe_from_json(&fs::read_to_string(path)?)
}

/// Formats with six significant digits, fixed-point.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

/// Writes labeled PR curves as CSV: a `label,threshold,precision,recall`
/// header, one row per curve point, and a `# <label> AP=<value>` summary
/// comment per curve. Values carry six significant digits.
pub fn write_pr_csv(curves: &[(String, PRCurve)], path: &Path) -> Result<(), IoError> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "label,threshold,precision,recall")?;
    for (label, curve) in curves {
        for p in &curve.points {
            writeln!(
                out,
                "{label},{},{},{}",
                format_sig6(p.threshold),
                format_sig6(p.precision),
                format_sig6(p.recall)
            )?;
        }
        writeln!(out, "# {label} AP={}", format_sig6(curve.ap))?;
    }
    out.flush()?;
    Ok(())
}
