//! Validated multi-sample data: `k` groups of real observations sharing a
//! common coordinate dimension `q`.

use crate::error::{Error, Result};

/// Dense row-major matrix of observations (rows) by coordinates (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row slices, rejecting ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::RaggedRows {
                    row: i,
                    found: row.len(),
                    expected: cols,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from a flat row-major buffer.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Invalid(format!(
                "flat buffer of length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Single-column matrix.
    pub fn from_column(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copies one column out.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1))
    }
}

/// `k >= 2` independent groups of observations, all sharing dimension `q`.
///
/// Immutable after construction; cheap to share across worker threads.
#[derive(Debug, Clone)]
pub struct MultiSampleDataset {
    groups: Vec<Matrix>,
    q: usize,
}

impl MultiSampleDataset {
    /// Validates raw matrices into a dataset.
    ///
    /// Rejects fewer than two groups, an empty group, differing column
    /// counts, and any non-finite entry (reported with group, row, column).
    pub fn new(groups: Vec<Matrix>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::TooFewGroups(groups.len()));
        }
        let q = groups[0].n_cols();
        for (g, m) in groups.iter().enumerate() {
            if m.n_rows() == 0 {
                return Err(Error::EmptyGroup { group: g });
            }
            if m.n_cols() != q {
                return Err(Error::DimensionMismatch {
                    group: g,
                    found: m.n_cols(),
                    expected: q,
                });
            }
            for i in 0..m.n_rows() {
                for (j, &v) in m.row(i).iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            group: g,
                            row: i,
                            col: j,
                        });
                    }
                }
            }
        }
        Ok(Self { groups, q })
    }

    /// Convenience constructor from nested row vectors.
    pub fn from_rows(groups: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mats = groups
            .iter()
            .map(|g| Matrix::from_rows(g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    /// Convenience constructor for one-dimensional groups.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        Self::new(columns.iter().map(|c| Matrix::from_column(c)).collect())
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn group(&self, g: usize) -> &Matrix {
        &self.groups[g]
    }

    pub fn groups(&self) -> &[Matrix] {
        &self.groups
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|m| m.n_rows()).collect()
    }

    /// Total pooled size `n`.
    pub fn n_total(&self) -> usize {
        self.groups.iter().map(|m| m.n_rows()).sum()
    }

    /// Prefix sums of group sizes, length `k + 1`; group `g` occupies pooled
    /// indices `offsets[g]..offsets[g + 1]`.
    pub fn group_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.groups.len() + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for m in &self.groups {
            acc += m.n_rows();
            offsets.push(acc);
        }
        offsets
    }
}

/// Maps a pooled index to `(group, within-group index)` given offsets.
pub fn pooled_to_group(offsets: &[usize], pooled: usize) -> (usize, usize) {
    debug_assert!(pooled < *offsets.last().unwrap());
    let g = offsets.partition_point(|&o| o <= pooled) - 1;
    (g, pooled - offsets[g])
}
