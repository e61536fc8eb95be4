use crate::error::{Error, Result};

/// Dense row-major matrix of category codes. Column `j` takes values in
/// `0..arity[j]`; codes are labels, never magnitudes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalMatrix {
    n_cols: usize,
    arity: Vec<u32>,
    data: Vec<u32>,
}

impl CategoricalMatrix {
    pub fn new(arity: Vec<u32>, data: Vec<u32>) -> Result<Self> {
        let n_cols = arity.len();
        if n_cols == 0 && !data.is_empty() || n_cols > 0 && !data.len().is_multiple_of(n_cols) {
            return Err(Error::invalid("matrix data is not a whole number of rows"));
        }
        Ok(CategoricalMatrix { n_cols, arity, data })
    }

    pub fn from_rows(arity: Vec<u32>, rows: &[Vec<u32>]) -> Result<Self> {
        let n_cols = arity.len();
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(Error::MalformedRow {
                    row: i,
                    expected: n_cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(arity, data)
    }

    pub fn n_rows(&self) -> usize {
        self.data.len().checked_div(self.n_cols).unwrap_or(0)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn arity(&self) -> &[u32] {
        &self.arity
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.n_cols.max(1))
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        CategoricalMatrix {
            n_cols: self.n_cols,
            arity: self.arity.clone(),
            data,
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.n_rows() * cols.len());
        for row in self.rows() {
            data.extend(cols.iter().map(|&j| row[j]));
        }
        CategoricalMatrix {
            n_cols: cols.len(),
            arity: cols.iter().map(|&j| self.arity[j]).collect(),
            data,
        }
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.n_cols + j] = v;
    }
}
