//! Binary (P5) PGM writing — dependency-free 8-bit grayscale renders.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::BinaryMatrix;

/// Writes an 8-bit P5 PGM. `pixels` is row-major, `width * height` bytes.
pub fn write_pgm(path: impl AsRef<Path>, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::DimensionMismatch {
            what: "pgm pixels",
            expected: format!("{}x{} = {}", width, height, width * height),
            got: format!("{}", pixels.len()),
        });
    }
    let path = path.as_ref();
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(pixels);
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

/// Grayscale heatmap of arbitrary values: min maps to 0, max to 255; a
/// constant field renders mid-gray.
pub fn grayscale(values: &[f32]) -> Vec<u8> {
    let mut lo = f32::INFINITY;
    let mut hi = f32::NEG_INFINITY;
    for &v in values {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    // Covers empty and constant inputs, and all-NaN inputs where no
    // comparison ever updated the bounds.
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return vec![128; values.len()];
    }
    values
        .iter()
        .map(|&v| (((v - lo) / (hi - lo)) * 255.0).round() as u8)
        .collect()
}

/// Overlay of a predicted mask against ground truth:
/// 0 = neither, 85 = truth only (missed), 170 = predicted only (spurious),
/// 255 = both (hit).
pub fn mask_overlay(truth: &BinaryMatrix, predicted: &BinaryMatrix) -> Result<Vec<u8>> {
    if truth.rows() != predicted.rows() || truth.cols() != predicted.cols() {
        return Err(Error::DimensionMismatch {
            what: "overlay masks",
            expected: format!("{}x{}", truth.rows(), truth.cols()),
            got: format!("{}x{}", predicted.rows(), predicted.cols()),
        });
    }
    Ok(truth
        .data()
        .iter()
        .zip(predicted.data())
        .map(|(&t, &p)| match (t != 0, p != 0) {
            (false, false) => 0,
            (true, false) => 85,
            (false, true) => 170,
            (true, true) => 255,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_and_payload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.pgm");
        write_pgm(&path, 2, 2, &[0, 85, 170, 255]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..], b"P5\n2 2\n255\n\x00\x55\xaa\xff");
    }

    #[test]
    fn grayscale_spans_full_range() {
        assert_eq!(grayscale(&[0.0, 0.5, 1.0]), vec![0, 128, 255]);
        assert_eq!(grayscale(&[3.0, 3.0]), vec![128, 128]);
    }

    #[test]
    fn overlay_codes() {
        let mut t = BinaryMatrix::zeros(1, 4);
        t.set(0, 1, true);
        t.set(0, 3, true);
        let mut p = BinaryMatrix::zeros(1, 4);
        p.set(0, 2, true);
        p.set(0, 3, true);
        assert_eq!(mask_overlay(&t, &p).unwrap(), vec![0, 85, 170, 255]);
    }
}
