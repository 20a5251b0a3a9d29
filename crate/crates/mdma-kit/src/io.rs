//! The `.tns` tensor container format.
//!
//! Layout, fixed little-endian regardless of host:
//!
//! ```text
//! offset  size          field
//! 0       4             magic, the ASCII bytes "FMT1"
//! 4       4             ndim, u32 LE, must be in [1, 5]
//! 8       4 * ndim      dims, u32 LE each
//! ...     4 * prod(dims) payload, row-major IEEE-754 f32 LE
//! ```
//!
//! A file must contain exactly the header plus the payload; anything shorter
//! is rejected as truncated and anything longer as trailing bytes. Binary
//! masks are stored as f32 0.0/1.0 and validated where a mask is expected.
//! Writes go through a temporary file in the destination directory followed
//! by a rename, so readers never observe a partial file.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"FMT1";
pub const MAX_NDIM: usize = 5;

/// Decodes a tensor from raw bytes.
pub fn decode_tensor(bytes: &[u8]) -> Result<Tensor> {
    if bytes.len() < 4 || &bytes[0..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(Error::BadHeader("missing ndim field".into()));
    }
    let ndim = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if !(1..=MAX_NDIM).contains(&ndim) {
        return Err(Error::BadHeader(format!(
            "ndim must be in [1, {MAX_NDIM}], got {ndim}"
        )));
    }
    let header_len = 8 + 4 * ndim;
    if bytes.len() < header_len {
        return Err(Error::BadHeader("missing dims".into()));
    }
    let mut dims = Vec::with_capacity(ndim);
    for i in 0..ndim {
        let off = 8 + 4 * i;
        dims.push(u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as usize);
    }
    let count = dims
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
        .ok_or(Error::DimOverflow)?;
    let payload_len = count.checked_mul(4).ok_or(Error::DimOverflow)?;
    if payload_len > (usize::MAX as u64) {
        return Err(Error::DimOverflow);
    }
    let expected = header_len + payload_len as usize;
    if bytes.len() < expected {
        return Err(Error::Truncated {
            expected,
            got: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::TrailingBytes(bytes.len() - expected));
    }
    let mut data = Vec::with_capacity(count as usize);
    for i in 0..count as usize {
        let off = header_len + 4 * i;
        data.push(f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()));
    }
    Tensor::new(dims, data)
}

/// Encodes a tensor to the byte layout above.
pub fn encode_tensor(tensor: &Tensor) -> Result<Vec<u8>> {
    let ndim = tensor.dims().len();
    if !(1..=MAX_NDIM).contains(&ndim) {
        return Err(Error::BadHeader(format!(
            "ndim must be in [1, {MAX_NDIM}], got {ndim}"
        )));
    }
    for &d in tensor.dims() {
        if d > u32::MAX as usize {
            return Err(Error::DimOverflow);
        }
    }
    let mut out = Vec::with_capacity(8 + 4 * ndim + 4 * tensor.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(ndim as u32).to_le_bytes());
    for &d in tensor.dims() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for &v in tensor.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    let bytes = fs::read(path)?;
    decode_tensor(&bytes)
}

/// Writes the tensor atomically: temp file in the same directory, then rename.
pub fn write_tensor(path: impl AsRef<Path>, tensor: &Tensor) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_tensor(tensor)?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(&bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
