//! Row-major sparse matrices.

use std::fmt::Write;

use crate::error::{Error, Result};

/// Sparse real matrix stored as one sorted `(column, value)` list per row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMatrix {
    ncols: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    /// Appends a row; entries are sorted and duplicate columns summed.
    pub fn push_row(&mut self, mut entries: Vec<(usize, f64)>) -> Result<()> {
        if let Some(&(c, _)) = entries.iter().find(|(c, _)| *c >= self.ncols) {
            return Err(Error::Dimension(format!(
                "column {c} out of range for {} columns",
                self.ncols
            )));
        }
        if entries.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::Dimension("non-finite matrix entry".into()));
        }
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        self.rows.push(merged);
        Ok(())
    }

    pub fn from_dense(rows: &[Vec<f64>], ncols: usize) -> Result<Self> {
        let mut m = Self::new(ncols);
        for r in rows {
            if r.len() != ncols {
                return Err(Error::Dimension("ragged dense rows".into()));
            }
            m.push_row(r.iter().copied().enumerate().filter(|e| e.1 != 0.0).collect())?;
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[(usize, f64)]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.rows[r]
            .binary_search_by_key(&c, |e| e.0)
            .map(|k| self.rows[r][k].1)
            .unwrap_or(0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.ncols
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(c, v)| v * x[c]).sum())
            .collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0.0; self.ncols];
                for &(c, v) in r {
                    d[c] = v;
                }
                d
            })
            .collect()
    }

    /// Coordinate list `row,col,value` with a header line.
    pub fn to_coo_csv(&self) -> String {
        let mut out = String::from("row,col,value\n");
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                writeln!(out, "{r},{c},{v:e}").expect("write to string");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_and_multiply() {
        let mut m = SparseMatrix::new(3);
        m.push_row(vec![(2, 1.0), (0, 2.0), (2, 0.5)]).unwrap();
        m.push_row(vec![]).unwrap();
        assert_eq!(m.row(0), &[(0, 2.0), (2, 1.5)]);
        assert_eq!(m.mul_vec(&[1.0, 5.0, 2.0]).unwrap(), vec![5.0, 0.0]);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.nnz(), 2);
        assert!(m.push_row(vec![(3, 1.0)]).is_err());
        assert!(m.mul_vec(&[1.0]).is_err());
        assert_eq!(m.to_coo_csv(), "row,col,value\n0,0,2e0\n0,2,1.5e0\n");
        assert_eq!(SparseMatrix::from_dense(&m.to_dense(), 3).unwrap(), m);
    }
}
