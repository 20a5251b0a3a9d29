//! Dense row-major f32 tensors.
//!
//! Everything in this crate computes on plain `Vec<f32>` buffers with a fixed
//! arithmetic order: inner sums always accumulate in ascending index order, in
//! f32. This is what makes outputs reproducible bit-for-bit across runs and
//! platforms, and what lets the naive test oracles demand exact equality.

use crate::error::{Error, Result};

/// An n-dimensional row-major f32 tensor (1..=5 dimensions in the file format,
/// unrestricted in memory).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        let n: usize = dims.iter().try_fold(1usize, |acc, &d| {
            acc.checked_mul(d).ok_or(Error::DimOverflow)
        })?;
        if dims.is_empty() {
            return Err(Error::BadHeader("tensor must have at least 1 dim".into()));
        }
        if data.len() != n {
            return Err(Error::DimensionMismatch {
                what: "tensor payload",
                expected: format!("{n} elements"),
                got: format!("{} elements", data.len()),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().try_fold(1usize, |acc, &d| {
            acc.checked_mul(d).ok_or(Error::DimOverflow)
        })?;
        Self::new(dims, vec![0.0; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Checks every entry is exactly 0.0 or 1.0, the on-disk encoding of a
    /// binary mask.
    pub fn validate_binary(&self) -> Result<()> {
        for (i, &v) in self.data.iter().enumerate() {
            if v != 0.0 && v != 1.0 {
                return Err(Error::NotBinary { index: i, value: v });
            }
        }
        Ok(())
    }

    pub fn validate_finite(&self, what: &'static str) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(what));
        }
        Ok(())
    }

    /// Row-major flat offset of a multi-index.
    pub fn offset(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                what: "tensor index rank",
                expected: format!("{}", self.dims.len()),
                got: format!("{}", index.len()),
            });
        }
        let mut off = 0usize;
        for (i, (&ix, &d)) in index.iter().zip(&self.dims).enumerate() {
            if ix >= d {
                return Err(Error::IndexOutOfRange {
                    what: "tensor index",
                    got: ix,
                    limit: d,
                });
            }
            let _ = i;
            off = off * d + ix;
        }
        Ok(off)
    }

    pub fn at(&self, index: &[usize]) -> Result<f32> {
        Ok(self.data[self.offset(index)?])
    }
}

/// A 2-D row-major f32 matrix. Thin wrapper used for per-frame feature maps
/// and score matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix payload",
                expected: format!("{}x{} = {}", rows, cols, rows * cols),
                got: format!("{}", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }
}

/// A 2-D row-major binary matrix. Entries are 0 or 1 by construction; the
/// on-disk representation is f32 0.0/1.0 (see `io`), validated on the way in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![1; rows * cols],
        }
    }

    /// Builds from f32 entries that must each be exactly 0.0 or 1.0.
    pub fn from_f32(rows: usize, cols: usize, data: &[f32]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "binary matrix payload",
                expected: format!("{}x{} = {}", rows, cols, rows * cols),
                got: format!("{}", data.len()),
            });
        }
        let mut out = Vec::with_capacity(data.len());
        for (i, &v) in data.iter().enumerate() {
            if v == 0.0 {
                out.push(0);
            } else if v == 1.0 {
                out.push(1);
            } else {
                return Err(Error::NotBinary { index: i, value: v });
            }
        }
        Ok(Self {
            rows,
            cols,
            data: out,
        })
    }

    pub fn to_f32(&self) -> Vec<f32> {
        self.data.iter().map(|&b| b as f32).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] != 0
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v as u8;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b != 0).count()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }
}

/// Dot product accumulated in ascending index order.
pub fn dot(a: &[f32], b: &[f32]) -> f32 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0f32;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

/// Sum accumulated in ascending index order.
pub fn sum(values: &[f32]) -> f32 {
    let mut acc = 0.0f32;
    for &v in values {
        acc += v;
    }
    acc
}

/// Binarizes a score map at its mean with a strict ">".
///
/// A constant map (min == max) is defined to produce all-false, so that
/// rounding inside the mean cannot decide the degenerate case either way.
pub fn mean_threshold_bits(scores: &[f32]) -> Vec<bool> {
    let mut min = f32::INFINITY;
    let mut max = f32::NEG_INFINITY;
    for &v in scores {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    if min == max {
        return vec![false; scores.len()];
    }
    let mean = sum(scores) / scores.len() as f32;
    scores.iter().map(|&v| v > mean).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_rejects_mismatched_payload() {
        assert!(Tensor::new(vec![2, 3], vec![0.0; 5]).is_err());
        assert!(Tensor::new(vec![2, 3], vec![0.0; 6]).is_ok());
    }

    #[test]
    fn offset_is_row_major() {
        let t = Tensor::new(vec![2, 3], (0..6).map(|v| v as f32).collect()).unwrap();
        assert_eq!(t.at(&[0, 0]).unwrap(), 0.0);
        assert_eq!(t.at(&[0, 2]).unwrap(), 2.0);
        assert_eq!(t.at(&[1, 0]).unwrap(), 3.0);
        assert!(t.at(&[2, 0]).is_err());
    }

    #[test]
    fn binary_validation() {
        let t = Tensor::new(vec![3], vec![0.0, 1.0, 0.5]).unwrap();
        assert!(matches!(
            t.validate_binary(),
            Err(Error::NotBinary { index: 2, .. })
        ));
        let t = Tensor::new(vec![2], vec![0.0, 1.0]).unwrap();
        assert!(t.validate_binary().is_ok());
    }
}
