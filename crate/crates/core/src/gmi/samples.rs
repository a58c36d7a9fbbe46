use std::ops::Range;

use super::{GmiError, Result};

/// An `m x d` table of finite samples stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    rows: usize,
    dims: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(rows: usize, dims: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 {
            return Err(GmiError::InsufficientSamples { needed: 1, got: 0 });
        }
        if dims == 0 {
            return Err(GmiError::Shape("sample matrix needs at least one column".into()));
        }
        if data.len() != rows * dims {
            return Err(GmiError::Shape(format!(
                "expected {} values for a {rows}x{dims} matrix, got {}",
                rows * dims,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(GmiError::NonFinite { row: pos / dims, col: pos % dims });
        }
        Ok(Self { rows, dims, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dims = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * dims);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dims {
                return Err(GmiError::Shape(format!("row {i} has {} columns, expected {dims}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), dims, data)
    }

    /// Build from equal-length columns.
    pub fn from_columns<C: AsRef<[f64]>>(cols: &[C]) -> Result<Self> {
        let rows = cols.first().map_or(0, |c| c.as_ref().len());
        if cols.iter().any(|c| c.as_ref().len() != rows) {
            return Err(GmiError::Shape("columns have different lengths".into()));
        }
        let dims = cols.len();
        let mut data = Vec::with_capacity(rows * dims);
        for i in 0..rows {
            data.extend(cols.iter().map(|c| c.as_ref()[i]));
        }
        Self::new(rows, dims, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dims + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(idx.len() * self.dims);
        for &i in idx {
            if i >= self.rows {
                return Err(GmiError::Shape(format!("row index {i} out of range ({})", self.rows)));
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(idx.len(), self.dims, data)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.dims) {
            return Err(GmiError::Shape(format!("column index {bad} out of range ({})", self.dims)));
        }
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        Self::new(self.rows, idx.len(), data)
    }

    /// Column-wise concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(GmiError::Shape(format!(
                "cannot stack {} rows beside {} rows",
                self.rows, other.rows
            )));
        }
        let dims = self.dims + other.dims;
        let mut data = Vec::with_capacity(self.rows * dims);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Self { rows: self.rows, dims, data })
    }

    /// Row-wise concatenation.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(GmiError::Shape(format!(
                "cannot stack {} columns under {} columns",
                other.dims, self.dims
            )));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Self { rows: self.rows + other.rows, dims: self.dims, data })
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub(crate) fn from_parts_unchecked(rows: usize, dims: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * dims);
        Self { rows, dims, data }
    }
}

/// Partition of a sample matrix's columns into X, Y and (optionally) Z blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpec {
    pub x: Range<usize>,
    pub y: Range<usize>,
    pub z: Range<usize>,
}

impl BlockSpec {
    /// Blocks laid out as `[X | Y | Z]` with the given widths.
    pub fn contiguous(dx: usize, dy: usize, dz: usize) -> Self {
        Self { x: 0..dx, y: dx..dx + dy, z: dx + dy..dx + dy + dz }
    }

    pub fn has_z(&self) -> bool {
        !self.z.is_empty()
    }

    /// Check the blocks are nonempty where required, disjoint and cover `dims` columns.
    pub fn validate(&self, dims: usize) -> Result<()> {
        if self.x.is_empty() || self.y.is_empty() {
            return Err(GmiError::InvalidBlocks("X and Y blocks must be nonempty".into()));
        }
        let mut covered = vec![0u8; dims];
        for r in [&self.x, &self.y, &self.z] {
            if r.end > dims {
                return Err(GmiError::InvalidBlocks(format!(
                    "range {}..{} exceeds {dims} columns",
                    r.start, r.end
                )));
            }
            for c in r.clone() {
                covered[c] += 1;
            }
        }
        if covered.iter().any(|&c| c > 1) {
            return Err(GmiError::InvalidBlocks("blocks overlap".into()));
        }
        if covered.iter().any(|&c| c == 0) {
            return Err(GmiError::InvalidBlocks("blocks do not cover every column".into()));
        }
        Ok(())
    }
}
