//! File formats: TT3D binary tensors, observation masks and result tables.
//!
//! TT3D layout, all integers little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 4     | magic `TT3D` |
//! | 4     | version, `u32` = 1 |
//! | 4     | dtype, `u32`: 0 real `f64`, 1 complex (`re`, `im` pairs of `f64`) |
//! | 24    | `n1`, `n2`, `n3` as `u64` |
//! | rest  | entries with `i` fastest, then `j`, then `k` |
//!
//! Every writer goes through a temporary file in the target directory that is
//! renamed into place, so a failed write never leaves a partial file.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lab::ExperimentRecord;
use crate::solver::SampleSet;
use crate::tensor::{Tensor3, C64};
use crate::transform::UnitaryTransform;

const MAGIC: &[u8; 4] = b"TT3D";
const VERSION: u32 = 1;
const DTYPE_REAL: u32 = 0;
const DTYPE_COMPLEX: u32 = 1;
const HEADER_LEN: usize = 36;

/// Header of a TT3D file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorFileHeader {
    pub complex: bool,
    pub dims: (usize, usize, usize),
}

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        contents(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Serializes a tensor to TT3D bytes; real tensors use the real dtype.
pub fn encode_tensor(z: &Tensor3) -> Vec<u8> {
    let complex = !z.is_real();
    let (n1, n2, n3) = z.dims();
    let width = if complex { 16 } else { 8 };
    let mut out = Vec::with_capacity(HEADER_LEN + z.len() * width);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(if complex { DTYPE_COMPLEX } else { DTYPE_REAL }).to_le_bytes());
    for n in [n1, n2, n3] {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for v in z.as_slice() {
        out.extend_from_slice(&v.re.to_le_bytes());
        if complex {
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

/// Parses and validates a TT3D header.
pub fn decode_header(bytes: &[u8]) -> Result<TensorFileHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("file too short for a header ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", String::from_utf8_lossy(&bytes[0..4]))));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let complex = match u32_at(bytes, 8) {
        DTYPE_REAL => false,
        DTYPE_COMPLEX => true,
        d => return Err(Error::Format(format!("unknown dtype {d}"))),
    };
    let dim = |at| {
        usize::try_from(u64_at(bytes, at)).map_err(|_| Error::Format("dimension too large".into()))
    };
    Ok(TensorFileHeader { complex, dims: (dim(12)?, dim(20)?, dim(28)?) })
}

/// Parses TT3D bytes.
pub fn decode_tensor(bytes: &[u8]) -> Result<Tensor3> {
    let header = decode_header(bytes)?;
    let (n1, n2, n3) = header.dims;
    let width = if header.complex { 16 } else { 8 };
    let payload = n1
        .checked_mul(n2)
        .and_then(|x| x.checked_mul(n3))
        .and_then(|x| x.checked_mul(width))
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let actual = bytes.len() - HEADER_LEN;
    if actual != payload {
        return Err(Error::Format(format!("payload is {actual} bytes, expected {payload}")));
    }
    let body = &bytes[HEADER_LEN..];
    let data = (0..n1 * n2 * n3)
        .map(|p| {
            let at = p * width;
            let im = if header.complex { f64_at(body, at + 8) } else { 0.0 };
            C64::new(f64_at(body, at), im)
        })
        .collect();
    Tensor3::new(header.dims, data).map_err(|e| Error::Format(e.to_string()))
}

/// Writes `z` as a TT3D file.
pub fn write_tensor(path: impl AsRef<Path>, z: &Tensor3) -> Result<()> {
    let bytes = encode_tensor(z);
    write_atomic(path.as_ref(), |w| Ok(w.write_all(&bytes)?))
}

/// Reads a TT3D file.
pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    decode_tensor(&fs::read(path)?)
}

/// Reads a unitary transform stored as an `n3 × n3 × 1` TT3D tensor.
pub fn read_transform(path: impl AsRef<Path>) -> Result<UnitaryTransform> {
    let t = read_tensor(path)?;
    let (n1, n2, n3) = t.dims();
    if n1 != n2 || n3 != 1 {
        return Err(Error::Format(format!("a transform file must be n × n × 1, got {:?}", t.dims())));
    }
    UnitaryTransform::custom(t.frontal_slice(0).clone_owned())
}

/// Writes a transform matrix as an `n3 × n3 × 1` TT3D tensor.
pub fn write_transform(path: impl AsRef<Path>, t: &UnitaryTransform) -> Result<()> {
    let n = t.n3();
    let m = t.matrix();
    write_tensor(path, &Tensor3::from_fn(n, n, 1, |i, j, _| m[(i, j)]))
}

const MASK_HEADER: [&str; 3] = ["i", "j", "k"];

/// Serializes `Ω` as CSV lines `i,j,k` under a header line.
pub fn encode_mask(s: &SampleSet, w: &mut dyn Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(MASK_HEADER)?;
    for &(i, j, k) in s.indices() {
        csv.write_record([i.to_string(), j.to_string(), k.to_string()])?;
    }
    csv.flush()?;
    Ok(())
}

/// Parses a mask file for a tensor of shape `dims`.
pub fn decode_mask(bytes: &[u8], dims: (usize, usize, usize)) -> Result<SampleSet> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    if csv.headers()?.iter().collect::<Vec<_>>() != MASK_HEADER {
        return Err(Error::Format("mask header must be 'i,j,k'".into()));
    }
    let mut indices = Vec::new();
    for (line, rec) in csv.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| -> Result<usize> {
            rec.get(c)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad mask entry on data line {}", line + 1)))
        };
        if rec.len() != 3 {
            return Err(Error::Format(format!("mask data line {} needs 3 fields", line + 1)));
        }
        indices.push((field(0)?, field(1)?, field(2)?));
    }
    SampleSet::new(dims, indices, 0).map_err(|e| Error::Format(format!("mask: {e}")))
}

pub fn write_mask(path: impl AsRef<Path>, s: &SampleSet) -> Result<()> {
    write_atomic(path.as_ref(), |w| encode_mask(s, w))
}

pub fn read_mask(path: impl AsRef<Path>, dims: (usize, usize, usize)) -> Result<SampleSet> {
    decode_mask(&fs::read(path)?, dims)
}

/// Column names of the results table.
pub const RESULTS_HEADER: [&str; 17] = [
    "n1", "n2", "n3", "transform", "sum_rank", "tubal_rank", "const", "m", "trial", "seed", "rel",
    "psnr", "ssim", "iters", "eta", "seconds", "success",
];

/// Formats a float with 17 significant digits; infinities print as `inf`
/// and `-inf`.
pub fn format_float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Writes the header and one row per record.
pub fn encode_results(records: &[ExperimentRecord], w: &mut dyn Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(RESULTS_HEADER)?;
    for r in records {
        csv.write_record([
            r.n1.to_string(),
            r.n2.to_string(),
            r.n3.to_string(),
            r.transform.clone(),
            r.ranks.sum().to_string(),
            r.ranks.tubal().to_string(),
            format_float(r.constant),
            r.m.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            format_float(r.rel),
            format_float(r.psnr),
            format_float(r.ssim),
            r.iterations.to_string(),
            format_float(r.eta),
            format_float(r.wall_seconds),
            r.success.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_results(path: impl AsRef<Path>, records: &[ExperimentRecord]) -> Result<()> {
    write_atomic(path.as_ref(), |w| encode_results(records, w))
}
